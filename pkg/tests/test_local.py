from fractions import Fraction

import sympy
import pytest
from hypothesis import assume, given, settings, strategies as st

from painleve_ve.algebra import ParamField, QuadraticNumber
from painleve_ve.cases import get_case
from painleve_ve.local import (
    analyze,
    classify_point,
    exponential_parts,
    exponents,
    frobenius,
    has_logarithm,
    is_apparent,
    katz_invariant,
    log_partner,
    singular_points,
)
from painleve_ve.operators import LinearODE2, ramify
from painleve_ve.variational import first_ve

t = sympy.Symbol("t")
Q = ParamField()


def case_ve(section, ramified=True):
    case = get_case(section)
    ve = first_ve(case.instance(), case.solution)
    return ramify(ve, ve.k) if ramified and ve.k > 1 else ve


def labels(points):
    return ["oo" if p is None else str(p) for p in points]


def airy():
    return LinearODE2(Q.zero(), Q.parse("-t"))


def test_singular_points():
    assert labels(singular_points(case_ve("4.9"))) == ["0", "theta1/2", "oo"]
    assert labels(singular_points(airy())) == ["oo"]
    assert sorted(labels(singular_points(case_ve("4.8")))) == ["0", "oo", "s"]


def test_p48_local_data():
    ve = case_ve("4.8")
    rep0 = classify_point(ve, "0")
    assert rep0.kind == "regular_singular"
    s = sympy.Symbol("s")
    assert {sympy.simplify(e.to_expr()) for e in rep0.exponents} == {1 + s, 1 - s}
    inf = classify_point(ve, None)
    assert inf.kind == "irregular_singular" and inf.katz == 1
    # the constant c in +-(t + c) comes out as 0
    assert sorted(sympy.sstr(p.q_expr()) for p in inf.exponential_parts) == ["-t", "t"]


def test_p48_printed_operator_has_log_at_s():
    case = get_case("4.8")
    printed = case.printed_ve()
    s = case.instance().parse("s")
    # the residue -1 of a1 at t = s forces exponents 2 and 0
    assert [str(e) for e in exponents(printed, s).pair()] == ["2", "0"]
    assert has_logarithm(printed, s)
    assert not is_apparent(printed, s)


def test_p48_derived_operator_is_apparent_at_s():
    ve = case_ve("4.8")
    s = ve.field.parse("s")
    assert is_apparent(ve, s) and not has_logarithm(ve, s)


def test_p47_generalized_exponents():
    ve = case_ve("4.7")
    rep = classify_point(ve, None)
    assert rep.kind == "irregular_singular" and rep.katz == 1
    lead = [p.eigen_terms[1] for p in rep.generalized_exponents]
    for c in lead:
        assert c * c == c.field.parse("delta/2")
    assert (lead[0] + lead[1]).is_zero()
    zero = classify_point(ve, "0")
    a = sympy.Symbol("a")
    assert {sympy.simplify(e.to_expr() ** 2) for e in zero.exponents} == {8 * a}


def test_p47_infinity_regular_iff_delta_zero():
    ve = case_ve("4.7")
    assert exponential_parts(ve.specialize({"delta": 0}), None) == []
    assert classify_point(ve.specialize({"delta": 0}), None).kind == "regular_singular"
    for d in (2, "-1/2", 3):
        assert len(exponential_parts(ve.specialize({"delta": d}), None)) == 2


def test_airy_katz():
    assert katz_invariant(airy(), None) == Fraction(3, 2)
    parts = exponential_parts(airy(), None)
    assert sorted(sympy.sstr(p.q_expr()) for p in parts) == ["-2*t**(3/2)/3", "2*t**(3/2)/3"]


def test_p49_local_data():
    ve = case_ve("4.9")
    assert has_logarithm(ve, "0")
    assert is_apparent(ve, ve.field.parse("theta1/2"))
    rep = classify_point(ve, None)
    assert rep.katz == 1
    assert sorted(sympy.sstr(p.q_expr()) for p in rep.exponential_parts) == ["-4*t", "4*t"]


@pytest.mark.parametrize("section", ["4.4", "4.5", "4.6"])
def test_ramified_cases_have_log_at_zero(section):
    ve = case_ve(section)
    assert has_logarithm(ve, "0")
    assert classify_point(ve, None).kind == "irregular_singular"


def test_euler_equation_has_no_log():
    ode = LinearODE2(Q.parse("1/t"), Q.parse("-1/t^2"))
    assert not has_logarithm(ode, "0")
    assert [str(e) for e in exponents(ode, "0").pair()] == ["1", "-1"]


def test_ordinary_point():
    rep = classify_point(airy(), "1")
    assert rep.kind == "ordinary"
    assert [str(e) for e in rep.exponents] == ["0", "1"]
    assert is_apparent(airy(), "1")


@pytest.mark.parametrize("section", ["4.1", "4.2", "4.3", "4.4", "4.5", "4.6", "4.7", "4.8", "4.9"])
def test_report_invariants(section):
    for rep in analyze(case_ve(section)):
        if rep.kind == "regular_singular":
            assert rep.exponents is not None and rep.katz == 0
        if rep.apparent and rep.kind != "ordinary":
            assert not rep.has_logarithm
        if rep.has_logarithm:
            assert rep.exponent_difference is not None
            assert Fraction(rep.exponent_difference).denominator == 1


def test_log_partner_at_double_root():
    ode = LinearODE2(Q.parse("1/t"), Q.parse("-1"))  # Bessel order 0 modified: exponents 0, 0
    sol = log_partner(ode, "0", order=8)
    assert sol.log_coefficient == Q.one()


def theta_residual(ode, rho, coeffs):
    """``t^2 L(t^rho S)`` divided by ``t^rho``."""
    S = sum(c.to_expr() * t**n for n, c in enumerate(coeffs))
    a1, a0 = ode.a1.to_expr(), ode.a0.to_expr()
    r = sympy.Rational(rho)
    return sympy.expand(t**2 * sympy.diff(S, t, 2) + 2 * r * t * sympy.diff(S, t) + r * (r - 1) * S
                        + t * a1 * (t * sympy.diff(S, t) + r * S) + t**2 * a0 * S)


fractions = st.fractions(-3, 3, max_denominator=4)


@settings(max_examples=80, deadline=None)
@given(fractions, fractions, st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.sampled_from([10, 20]))
def test_frobenius_residual_valuation(rho, p0, p_tail, q_tail, order):
    q0 = -(rho * rho + (p0 - 1) * rho)
    other = 1 - p0 - rho
    diff = rho - other
    assume(not (diff.denominator == 1 and diff < 0))
    p = p0 + sum(c * t ** (i + 1) for i, c in enumerate(p_tail))
    q = q0 + sum(c * t ** (i + 1) for i, c in enumerate(q_tail))
    ode = LinearODE2(Q.from_expr(p / t), Q.from_expr(q / t**2))
    sol = frobenius(ode, "0", Q.const(rho), order)
    res = theta_residual(ode, rho, sol.series)
    poly = sympy.Poly(res, t)
    low = min((m[0] for m, c in poly.terms() if c != 0), default=10**6)
    assert low >= order


@settings(max_examples=150, deadline=None)
@given(fractions, fractions, fractions)
def test_fuchs_relation_hypergeometric(a, b, c):
    a1 = Q.from_expr((c - (a + b + 1) * t) / (t * (1 - t)))
    a0 = Q.from_expr(-a * b / (t * (1 - t)))
    ode = LinearODE2(a1, a0)
    total = QuadraticNumber(Q.zero())
    count = 0
    for p in singular_points(ode):
        ex = exponents(ode, p)
        for e in ex.pair():
            total = total + e
        count += 1
    # sum over singular points of exponent sums = (#points - 2), ordinary points contribute nothing extra
    skipped = 3 - count
    assert total.integer_value() == 1 - skipped
