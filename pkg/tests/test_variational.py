import sympy
import pytest
from hypothesis import given, settings, strategies as st

from painleve_ve.algebra import ExpPolyTerm, ParamField
from painleve_ve.cases import CASES, get_case
from painleve_ve.catalog import PainleveInstance, instantiate
from painleve_ve.operators import ramify
from painleve_ve.variational import (
    NotASolutionError,
    first_ve,
    hamiltonian_nve,
    prop31_check,
    second_ve,
    specialize_source,
    veh_system,
)

t = sympy.Symbol("t")


def test_airy():
    ve = first_ve(instantiate("P2", {"alpha": 0}), "0")
    assert ve.a1.is_zero() and ve.a0 == ve.field.parse("-t")


def test_p4_minus_two():
    inst = instantiate("P4", {"alpha": 0, "beta": -2})
    ve = first_ve(inst, "-2*t")
    assert ve.a1 == inst.parse("-1/t") and ve.a0 == inst.parse("-4*t^2")


def test_degp5_first_coefficient():
    inst = instantiate("degP5", {"theta0": "1/2"})
    ve = first_ve(inst, "1-theta1/(2*t)")
    assert ve.a1 == inst.parse("(4*t-3*theta1)/(t*(2*t-theta1))")


def test_rejects_non_solution():
    with pytest.raises(NotASolutionError):
        first_ve(instantiate("P2", {"alpha": 0}), "t")


def test_ramified_ve():
    ve = first_ve(get_case("4.4").instance(), "-t^(1/2)")
    assert ve.k == 2
    r = ramify(ve, 2)
    assert r.k == 1 and r.variable == "s"


@pytest.mark.parametrize("case", [c for c in CASES if c.expected_source], ids=lambda c: c.section)
def test_second_ve_sources(case):
    inst = case.instance()
    second = second_ve(inst, case.solution)
    assert second.source == inst.parse(case.expected_source)
    assert second.homogeneous.same_operator(first_ve(inst, case.solution))


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.section)
def test_second_ve_is_quadratic(case):
    assert second_ve(case.instance(), case.solution).is_quadratic_form()


def test_p2_second_ve_vanishes():
    assert second_ve(instantiate("P2", {"alpha": 0}), "0").source.is_zero()


def test_specialize_source_p4_two_ninths():
    inst = get_case("4.2").instance()
    second = second_ve(inst, "-2*t/3")
    field, c = inst.field.with_root(inst.parse("-1/3"), "c")
    v0 = ExpPolyTerm(0, c * field.parse("t^2"), field.one())
    got = specialize_source(second, v0)
    expected = ExpPolyTerm(-1, 2 * c * field.parse("t^2"), 3 * c + 2 * field.parse("t^2"))
    assert got == expected


def test_specialize_source_p4_minus_two_oracle():
    inst = get_case("4.3").instance()
    second = second_ve(inst, "-2*t")
    v0 = ExpPolyTerm(0, inst.parse("t^2"), inst.field.one())
    got = specialize_source(second, v0)
    assert got.q == inst.parse("2*t^2")
    v = sympy.exp(t**2)
    src = (sympy.Rational(1, 2) / t * v * sympy.diff(v, t, 2) - sympy.Rational(1, 4) / t * sympy.diff(v, t) ** 2
           - 7 * t * v**2)
    assert sympy.simplify(got.to_expr() - src) == 0


def test_specialize_source_zero_and_non_solution():
    inst = get_case("4.3").instance()
    second = second_ve(inst, "-2*t")
    zero = ExpPolyTerm(0, 0, inst.field.zero())
    assert specialize_source(second, zero).is_zero()
    with pytest.raises(ValueError):
        specialize_source(second, ExpPolyTerm(0, inst.parse("t"), inst.field.one()))


@pytest.mark.parametrize("case", CASES, ids=lambda c: c.section)
def test_prop31(case):
    assert prop31_check(case.instance(), case.solution)


def test_prop31_perturbed_control():
    inst = instantiate("P4", {"alpha": 0, "beta": -2})
    assert not prop31_check(inst, "-2*t", inst.H + inst.parse("y*t"))


def test_prop31_p2_alpha_one():
    inst = instantiate("P2", {"alpha": 1})
    assert prop31_check(inst, "-1/t")


def test_veh_structure():
    system = veh_system(instantiate("P2", {"alpha": 0}), "0")
    assert all(c.is_zero() for c in system.row("a"))
    ve = hamiltonian_nve(instantiate("P2", {"alpha": 0}), "0")
    assert ve.a0 == ve.field.parse("-t")


small = st.integers(-3, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=1, max_size=3), st.lists(small, min_size=1, max_size=3))
def test_linear_equation_is_its_own_ve(pc, qc):
    field = ParamField()
    p = field.from_expr(sum(c * t**i for i, c in enumerate(pc)))
    q = field.from_expr(sum(c * t**i for i, c in enumerate(qc)) / (1 + t**2))
    R = p * field.gen("xp") + q * field.gen("x")
    inst = PainleveInstance("P1", {}, field, R, field.one(), field.parse("y^2/2"))
    ve = first_ve(inst, "0")
    assert ve.a1 == -p and ve.a0 == -q


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([c for c in CASES if c.ramification == 1]), st.fractions(-5, 5).filter(bool))
def test_source_weight_two(case, lam):
    inst = case.instance()
    src = second_ve(inst, case.solution).source
    f = src.field
    scaled = src.substitute({n: f.const(lam) * f.gen(n) for n in ("v", "vp", "vpp")})
    assert scaled == f.const(lam) ** 2 * src
