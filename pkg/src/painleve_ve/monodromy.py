"""Numerical analytic continuation of ``v'' + a1 v' + a0 v = 0`` along complex paths."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import sympy
from scipy.integrate import quad, solve_ivp

from .local import AlgebraicPoint, singular_points
from .operators import LinearODE2


class PathError(ValueError):
    """The path runs too close to a singularity or the integrator gave up."""


@dataclass(frozen=True)
class Segment:
    """A line ``start -> end`` or an arc ``center + radius e^(i theta)``, ``theta0 -> theta1``."""

    kind: str
    start: complex = 0j
    end: complex = 0j
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    def point(self, s: float) -> complex:
        if self.kind == "line":
            return self.start + s * (self.end - self.start)
        theta = self.theta0 + s * (self.theta1 - self.theta0)
        return self.center + self.radius * cmath.exp(1j * theta)

    def velocity(self, s: float) -> complex:
        if self.kind == "line":
            return self.end - self.start
        theta = self.theta0 + s * (self.theta1 - self.theta0)
        return 1j * self.radius * cmath.exp(1j * theta) * (self.theta1 - self.theta0)

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment("line", start=self.end, end=self.start)
        return Segment("arc", center=self.center, radius=self.radius, theta0=self.theta1, theta1=self.theta0)

    def distance_to(self, p: complex, samples: int = 256) -> float:
        if self.kind == "arc":
            span = abs(self.theta1 - self.theta0)
            if span >= 2 * math.pi - 1e-12:
                return abs(abs(p - self.center) - self.radius)
        return min(abs(self.point(i / samples) - p) for i in range(samples + 1))


@dataclass(frozen=True)
class ComplexPath:
    segments: tuple[Segment, ...]

    @classmethod
    def circle(cls, center: complex, radius: float, orientation: int = 1) -> "ComplexPath":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls((Segment("arc", center=complex(center), radius=float(radius), theta0=0.0,
                            theta1=2 * math.pi * (1 if orientation >= 0 else -1)),))

    @classmethod
    def polygon(cls, waypoints: Sequence[complex]) -> "ComplexPath":
        if len(waypoints) < 2:
            raise ValueError("a polygon needs at least two waypoints")
        pts = [complex(w) for w in waypoints]
        return cls(tuple(Segment("line", start=a, end=b) for a, b in zip(pts, pts[1:])))

    @property
    def base_point(self) -> complex:
        return self.segments[0].point(0.0)

    @property
    def end_point(self) -> complex:
        return self.segments[-1].point(1.0)

    @property
    def waypoints(self) -> list[complex]:
        return [self.base_point] + [s.point(1.0) for s in self.segments]

    def reversed(self) -> "ComplexPath":
        return ComplexPath(tuple(s.reversed() for s in reversed(self.segments)))

    def then(self, other: "ComplexPath") -> "ComplexPath":
        return ComplexPath(self.segments + other.segments)

    def clearance(self, points: Sequence[complex]) -> float:
        if not points:
            return math.inf
        return min(seg.distance_to(p) for seg in self.segments for p in points)


@dataclass(frozen=True)
class TransferMatrix:
    """Maps ``(v, v')`` at the start of a path to ``(v, v')`` at its end."""

    matrix: np.ndarray
    error_estimate: float

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(self.matrix @ other.matrix, self.error_estimate + other.error_estimate)


def _numeric(ode: LinearODE2):
    if ode.k != 1:
        raise ValueError("ramify the operator before integrating")
    if ode.field.params:
        raise ValueError(f"specialize parameters first (free: {', '.join(ode.field.params)})")
    t = sympy.Symbol("t")
    a1 = sympy.lambdify(t, ode.a1.to_radical_expr(), "numpy")
    a0 = sympy.lambdify(t, ode.a0.to_radical_expr(), "numpy")
    return (lambda z: complex(a1(z))), (lambda z: complex(a0(z)))


def finite_singularities(ode: LinearODE2) -> list[complex]:
    out = []
    for p in singular_points(ode):
        if p is None:
            continue
        if isinstance(p, AlgebraicPoint):
            roots = sympy.Poly(p.polynomial.to_radical_expr(), sympy.Symbol("t")).nroots()
            out.extend(complex(r) for r in roots)
        else:
            out.append(complex(sympy.N(p.to_radical_expr())))
    return out


def _integrate(a1, a0, path: ComplexPath, rtol: float) -> np.ndarray:
    y = np.eye(2, dtype=complex).reshape(-1)
    for seg in path.segments:
        def rhs(s, Y, seg=seg):
            z = seg.point(s)
            dz = seg.velocity(s)
            c1, c0 = a1(z), a0(z)
            M = Y.reshape(2, 2)
            out = np.empty((2, 2), dtype=complex)
            out[0] = M[1]
            out[1] = -c0 * M[0] - c1 * M[1]
            return (dz * out).reshape(-1)

        sol = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=rtol, atol=rtol * 1e-3)
        if not sol.success:
            raise PathError(f"integration failed near {seg.point(sol.t[-1])}: {sol.message}")
        y = sol.y[:, -1]
    return y.reshape(2, 2)


def integrate_path(ode: LinearODE2, path: ComplexPath, rtol: float = 1e-10,
                   clearance: float | None = None) -> TransferMatrix:
    """Transfer matrix along ``path``; the error estimate compares two tolerances."""
    a1, a0 = _numeric(ode)
    sing = finite_singularities(ode)
    gap = path.clearance(sing)
    needed = clearance if clearance is not None else 1e-6
    if gap < needed:
        raise PathError(f"path passes within {gap:.3g} of a singular point")
    fine = _integrate(a1, a0, path, rtol)
    coarse = _integrate(a1, a0, path, rtol * 100)
    err = float(np.max(np.abs(fine - coarse)))
    return TransferMatrix(fine, max(err, rtol * float(np.max(np.abs(fine)))))


def abel_determinant(ode: LinearODE2, path: ComplexPath) -> complex:
    """``exp(-int a1 dt)`` along the path, by quadrature."""
    a1, _ = _numeric(ode)
    total = 0j
    for seg in path.segments:
        f = lambda s, seg=seg: a1(seg.point(s)) * seg.velocity(s)
        re = quad(lambda s: f(s).real, 0.0, 1.0, limit=200, epsabs=1e-13)[0]
        im = quad(lambda s: f(s).imag, 0.0, 1.0, limit=200, epsabs=1e-13)[0]
        total += re + 1j * im
    return cmath.exp(-total)


def monodromy_matrix(ode: LinearODE2, center: complex, radius: float, rtol: float = 1e-10,
                     orientation: int = 1) -> TransferMatrix:
    center = complex(center)
    sing = finite_singularities(ode)
    inside = [p for p in sing if abs(p - center) < radius]
    on = [p for p in sing if abs(abs(p - center) - radius) < 1e-9]
    if on:
        raise PathError("the circle passes through a singular point")
    if not inside or any(abs(p - center) > 1e-12 for p in inside):
        raise PathError(f"circle of radius {radius} about {center} must enclose exactly that singular point")
    return integrate_path(ode, ComplexPath.circle(center, radius, orientation), rtol)


def monodromy_trace(ode: LinearODE2, center, radius: float, rtol: float = 1e-10) -> complex:
    """Trace of the local monodromy around ``center`` (the only singularity inside the circle)."""
    return monodromy_matrix(ode, complex(sympy.N(sympy.sympify(center))), radius, rtol).trace


def monodromy_at_infinity(ode: LinearODE2, radius: float, rtol: float = 1e-10) -> TransferMatrix:
    """Loop ``|t| = radius`` traversed negatively; ``radius`` must exceed every finite singularity."""
    sing = finite_singularities(ode)
    if any(abs(p) >= radius for p in sing):
        raise PathError("radius must exceed the modulus of every finite singular point")
    return integrate_path(ode, ComplexPath.circle(0j, radius, -1), rtol)


def p5_ve(a, delta) -> LinearODE2:
    from .catalog import instantiate
    from .variational import first_ve

    inst = instantiate("P5", {"alpha": "a", "beta": "-a", "gamma": 0, "delta": "delta"})
    return first_ve(inst, "-1").specialize({"a": a, "delta": delta})


@dataclass(frozen=True)
class TraceCheck:
    a: str
    trace: complex
    expected: float
    residual: float
    error_estimate: float


def check_trace_identity(a, delta=2, radius: float = 1.0, rtol: float = 1e-10) -> TraceCheck:
    """``|trace of the monodromy at 0 - 2 cos(2 pi sqrt(8a))|`` for the P5 VE along ``x = -1``."""
    if sympy.nsimplify(str(delta)) == 0:
        raise ValueError("delta must be nonzero")
    ode = p5_ve(a, delta)
    mono = monodromy_matrix(ode, 0j, radius, rtol)
    a_val = float(sympy.nsimplify(str(a)))
    expected = 2 * math.cos(2 * math.pi * math.sqrt(8 * a_val))
    return TraceCheck(str(a), mono.trace, expected, abs(mono.trace - expected), mono.error_estimate)
