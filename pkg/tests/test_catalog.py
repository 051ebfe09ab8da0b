import sympy
import pytest
from hypothesis import given, settings, strategies as st

from painleve_ve.algebra import DenominatorVarietyError
from painleve_ve.cases import CASES
from painleve_ve.catalog import (
    FAMILIES,
    derive_in_D,
    first_integral_check,
    hamiltonian_elimination,
    instantiate,
    verify_solution,
)

t, x, xp, y = sympy.symbols("t x xp y")


def test_p2_right_side():
    inst = instantiate("P2", {"alpha": 0})
    assert inst.R == inst.parse("2*x^3 + t*x")
    assert inst.den.is_constant()


def test_p4_standard_form():
    inst = instantiate("P4", {"alpha": "alpha", "beta": "beta"})
    expected = "xp^2/(2*x) + 3/2*x^3 + 4*t*x^2 + 2*(t^2-alpha)*x + beta/x"
    assert inst.R == inst.parse(expected)


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_hamiltonian_reproduces_equation(family):
    inst = instantiate(family)
    assert inst.H.degree("y") == 2
    assert hamiltonian_elimination(inst.H) == inst.R


@pytest.mark.parametrize("family", ["P2", "P4", "P5", "degP5"])
def test_hamiltonian_elimination_oracle(family):
    # eliminate y with sympy from x' = H_y, y' = -H_x
    _, R, H = FAMILIES[family]
    Y = sympy.Symbol("Y")
    yfun = sympy.solve(sympy.Eq(xp, sympy.diff(H, y)), y)
    assert len(yfun) == 1
    yx = yfun[0]
    Hy = sympy.diff(H, y)
    xpp = sympy.diff(Hy, t) + sympy.diff(Hy, x) * xp + sympy.diff(Hy, y) * (-sympy.diff(H, x))
    assert sympy.cancel(xpp.subs(y, yx) - R) == 0


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError):
        instantiate("P2", {"beta": 1})


def test_reserved_name_rejected():
    with pytest.raises(ValueError):
        instantiate("P2", {"alpha": "x"})


def test_derive_in_D_examples():
    inst = instantiate("P2", {"alpha": 0})
    assert derive_in_D(inst, "t") == inst.field.one()
    assert derive_in_D(inst, "x") == inst.parse("xp")
    assert derive_in_D(inst, "xp") == inst.parse("2*x^3 + t*x")
    with pytest.raises(ValueError):
        derive_in_D(inst, "xpp")


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.section)
def test_case_solutions(case):
    inst = case.instance()
    assert verify_solution(inst, case.solution).is_zero()


def test_non_solution_residual():
    inst = instantiate("P2", {"alpha": 0})
    assert not verify_solution(inst, "t").is_zero()


def test_solution_on_denominator_variety():
    inst = instantiate("P4", {"alpha": 0, "beta": "-2"})
    with pytest.raises(DenominatorVarietyError):
        verify_solution(inst, "0")


def test_p4_oracle_solution():
    # independent check of x0 = -2t in the standard P4 form
    R = xp**2 / (2 * x) + sympy.Rational(3, 2) * x**3 + 4 * t * x**2 + 2 * t**2 * x - 2 / x
    x0 = -2 * t
    assert sympy.simplify(sympy.diff(x0, t, 2) - R.subs({x: x0, xp: sympy.diff(x0, t)})) == 0


P3_F = "t^2*xp^2 + 2*t*x*xp - (C + 2*alpha*t*x + gamma*t^2*x^2)*x^2"
P5_F = "t^2*xp^2 - (x-1)^2*(2*alpha*x^2 + C*x - 2*beta)"


def test_first_integral_p3():
    inst = instantiate("P3", {"beta": 0, "delta": 0})
    res = first_integral_check(inst, P3_F)
    assert res.generates_ideal
    assert res.cofactor == res.cofactor.field.from_expr(2 * xp / x)


def test_first_integral_p3_oracle():
    # classical P3 with beta = delta = 0: F' - (2x'/x) F vanishes identically
    al, ga, C = sympy.symbols("alpha gamma C")
    R = xp**2 / x - xp / t + al * x**2 / t + ga * x**3
    F = t**2 * xp**2 + 2 * t * x * xp - (C + 2 * al * t * x + ga * t**2 * x**2) * x**2
    dF = sympy.diff(F, t) + sympy.diff(F, x) * xp + sympy.diff(F, xp) * R
    assert sympy.cancel(dF - 2 * xp / x * F) == 0


def test_first_integral_p5():
    inst = instantiate("P5", {"gamma": 0, "delta": 0})
    res = first_integral_check(inst, P5_F)
    assert res
    assert res.cofactor == res.cofactor.field.from_expr(xp * (3 * x - 1) / (x * (x - 1)))


def test_first_integral_negative():
    inst = instantiate("P2", {"alpha": 0})
    assert not first_integral_check(inst, "x").generates_ideal


def test_first_integral_rejects_zero():
    with pytest.raises(ValueError):
        first_integral_check(instantiate("P2", {"alpha": 0}), "0")


small = st.integers(-3, 3)


@st.composite
def d_expr(draw):
    """Polynomial in x, xp with coefficients in Q[t], divided by a power of x."""
    terms = draw(st.lists(st.tuples(small, st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
                          min_size=1, max_size=4))
    expr = sum(c * t**i * x**j * xp**k for c, i, j, k in terms)
    return expr / x ** draw(st.integers(0, 1))


@settings(max_examples=150, deadline=None)
@given(d_expr(), d_expr(), st.sampled_from(["P2", "P4"]))
def test_derivation_leibniz(f, g, family):
    inst = instantiate(family, {name: 1 for name in FAMILIES[family][0]})
    F_, G_ = inst.field.from_expr(f), inst.field.from_expr(g)
    assert derive_in_D(inst, F_ * G_) == derive_in_D(inst, F_) * G_ + F_ * derive_in_D(inst, G_)
    assert derive_in_D(inst, F_ + G_) == derive_in_D(inst, F_) + derive_in_D(inst, G_)


@settings(max_examples=60, deadline=None)
@given(st.lists(small.filter(bool), min_size=1, max_size=3), st.integers(0, 2))
def test_first_integral_scaling(coeffs, power):
    inst = instantiate("P5", {"gamma": 0, "delta": 0}).extend(["C"])
    F = inst.parse(P5_F)
    g = inst.field.from_expr(sum(c * t**i for i, c in enumerate(coeffs)) * t**power)
    if g.is_zero():
        return
    base = first_integral_check(inst, F)
    scaled = first_integral_check(inst, g * F)
    assert scaled.generates_ideal == base.generates_ideal
    assert scaled.cofactor == base.cofactor + g.derive() / g
