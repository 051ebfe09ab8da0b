import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from painleve_ve.algebra import ParamField
from painleve_ve.cases import get_case
from painleve_ve.monodromy import (
    ComplexPath,
    PathError,
    Segment,
    abel_determinant,
    check_trace_identity,
    integrate_path,
    monodromy_at_infinity,
    monodromy_matrix,
    monodromy_trace,
    p5_ve,
)
from painleve_ve.operators import LinearODE2
from painleve_ve.variational import first_ve

Q = ParamField()


def test_free_particle_transfer():
    ode = LinearODE2(Q.zero(), Q.zero())
    m = integrate_path(ode, ComplexPath.polygon([0.3, 1.1 + 0.5j])).matrix
    assert np.allclose(m, [[1, 0.8 + 0.5j], [0, 1]], atol=1e-10)


@pytest.mark.parametrize("length", [0.5, 1.0, 2.0])
def test_exponential_transfer(length):
    ode = LinearODE2(Q.zero(), Q.parse("-1"))
    m = integrate_path(ode, ComplexPath.polygon([0, length])).matrix
    c, s = math.cosh(length), math.sinh(length)
    assert np.allclose(m, [[c, s], [s, c]], rtol=1e-9, atol=1e-9)


def test_p5_trace_minus_two():
    assert abs(monodromy_trace(p5_ve("1/32", 2), 0, 1.0) + 2) < 1e-8


def test_p5_trace_matches_formula():
    for a in ("1/8", "1/2"):
        chk = check_trace_identity(a)
        assert chk.residual < 1e-6
        assert chk.error_estimate < 1e-6


def test_derived_48_apparent_point_trivial_trace():
    ode = first_ve(get_case("4.8").instance(), get_case("4.8").solution).specialize({"s": 3})
    assert abs(monodromy_trace(ode, 3, 1.0) - 2) < 1e-8


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
def test_trace_independent_of_radius(radius):
    assert abs(monodromy_trace(p5_ve("1/2", 2), 0, radius) - 2 * math.cos(2 * math.pi * 2)) < 1e-7


def test_ordinary_loop_is_identity():
    ode = p5_ve("1/2", 2)
    m = integrate_path(ode, ComplexPath.circle(2.0, 0.5)).matrix
    assert np.allclose(m, np.eye(2), atol=1e-8)


def test_determinant_matches_abel():
    ode = p5_ve("1/32", 2)
    path = ComplexPath.polygon([1, 1 + 1j, -1 + 1j, -0.5 - 0.7j])
    tm = integrate_path(ode, path)
    assert abs(tm.det - abel_determinant(ode, path)) < 1e-8
    # a1 = 1/t: going once around 0 contributes exp(-2 pi i) = 1
    assert abs(monodromy_matrix(ode, 0, 1.0).det - 1) < 1e-8


def test_enclosure_errors():
    ode = first_ve(get_case("4.8").instance(), get_case("4.8").solution).specialize({"s": 3})
    with pytest.raises(PathError):
        monodromy_matrix(ode, 0, 4.0)
    with pytest.raises(PathError):
        monodromy_matrix(ode, 0, 3.0)
    with pytest.raises(PathError):
        integrate_path(ode, ComplexPath.polygon([-1, 1]))
    with pytest.raises(PathError):
        monodromy_at_infinity(ode, 2.0)


def test_unspecialized_rejected():
    with pytest.raises(ValueError):
        integrate_path(first_ve(get_case("4.7").instance(), "-1"), ComplexPath.circle(0, 1))


def test_infinity_loop_is_inverse_of_finite_loop():
    ode = p5_ve("1/8", 2)
    inf = monodromy_at_infinity(ode, 1.0).matrix
    zero = monodromy_matrix(ode, 0, 1.0).matrix
    assert np.allclose(inf @ zero, np.eye(2), atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(0.2, 2)), min_size=1, max_size=3))
def test_reversal_composes_to_identity(pts):
    ode = p5_ve("9/32", 2)
    way = [1.0 + 0j] + [complex(x, y) for x, y in pts]
    path = ComplexPath.polygon(way)
    fwd = integrate_path(ode, path)
    back = integrate_path(ode, path.reversed())
    prod = (back @ fwd).matrix
    assert np.max(np.abs(prod - np.eye(2))) < 10 * (fwd.error_estimate + back.error_estimate) * max(1.0, np.max(np.abs(back.matrix)))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0, 2 * math.pi))
def test_conjugated_loop_keeps_trace(radius, phase):
    ode = p5_ve("1/8", 2)
    start = radius * cmath.exp(1j * phase)
    lead = ComplexPath.polygon([1.0 + 1.0j, start])
    loop = ComplexPath((Segment("arc", center=0j, radius=radius, theta0=phase, theta1=phase + 2 * math.pi),))
    tm = integrate_path(ode, lead.then(loop).then(lead.reversed()))
    assert abs(tm.trace - 2.0) < 1e-6
