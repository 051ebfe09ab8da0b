"""Local analysis of ``v'' + a1 v' + a0 v = 0`` at a point of the t-sphere.

At a point ``p`` with local parameter ``z`` (``z = t - c`` or ``z = 1/t``) the
operator is rewritten as ``theta^2 + P1 theta + P0`` with ``theta = z d/dz``:

* finite point: ``P1 = z a1 - 1``, ``P0 = z^2 a0``;
* infinity:     ``P1 = 1 - t a1``, ``P0 = t^2 a0``.

Everything below works with the Laurent expansions of ``P1`` and ``P0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

import sympy

from .algebra import ParamField, QuadraticNumber, RationalFunction
from .operators import LinearODE2

INFINITY = None


def _point_label(point) -> str:
    return "oo" if point is None else str(point)


def _as_point(ode: LinearODE2, point):
    if point is None or point == "oo" or point == "infinity":
        return None
    if isinstance(point, RationalFunction):
        return ode.field.convert(point)
    if isinstance(point, str):
        return ode.field.parse(point)
    return ode.field.const(point)


def _require_rational(ode: LinearODE2) -> None:
    if ode.k != 1:
        raise ValueError("the operator has ramified coefficients; ramify it first")


@dataclass(frozen=True)
class AlgebraicPoint:
    """Root of an irreducible factor of degree > 1 in t (not located in the field)."""

    polynomial: RationalFunction

    def __str__(self):
        return f"root of {self.polynomial}"


def singular_points(ode: LinearODE2) -> list:
    """Finite poles of the coefficients (as field constants) followed by ``None`` for infinity if singular."""
    _require_rational(ode)
    field = ode.field
    points: list = []
    seen = []
    for coeff in (ode.a1, ode.a0):
        if coeff.is_zero():
            continue
        _, factors = coeff.value.denom.factor_list()
        for factor, _mult in factors:
            if factor.degree(0) <= 0:
                continue
            poly = RationalFunction(field, field._field(factor))
            if factor.degree(0) == 1:
                coeffs = poly.t_coefficients()
                root = -coeffs.get(0, field.zero()) / coeffs[1]
                if not any((root - s).is_zero() for s in seen if isinstance(s, RationalFunction)):
                    seen.append(root)
                    points.append(root)
            else:
                if not any(isinstance(s, AlgebraicPoint) and s.polynomial == poly for s in seen):
                    ap = AlgebraicPoint(poly)
                    seen.append(ap)
                    points.append(ap)
    if not _ordinary_at_infinity(ode):
        points.append(None)
    return points


def _ordinary_at_infinity(ode: LinearODE2) -> bool:
    t = ode.field.gen("t")
    shifted = 2 / t - ode.a1
    ok1 = shifted.is_zero() or shifted.valuation(None) >= 2
    ok0 = ode.a0.is_zero() or ode.a0.valuation(None) >= 4
    return ok1 and ok0


# ---------------------------------------------------------------------------
# theta-form data
# ---------------------------------------------------------------------------


@dataclass
class _Series:
    """Truncated Laurent series ``sum coeffs[i] z^(valuation + i)``."""

    valuation: Optional[int]
    coeffs: list

    def coeff(self, n: int, zero):
        if self.valuation is None:
            return zero
        i = n - self.valuation
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        if i < 0:
            return zero
        raise IndexError(f"series truncated before z^{n}")


def theta_form(ode: LinearODE2, point, terms: int = 12) -> tuple[_Series, _Series]:
    """Laurent data of ``(P1, P0)`` at ``point`` in its local parameter."""
    _require_rational(ode)
    t = ode.field.gen("t")
    if point is None:
        P1 = 1 - t * ode.a1
        P0 = t * t * ode.a0
        at = None
    else:
        z = t - point
        P1 = z * ode.a1 - 1
        P0 = z * z * ode.a0
        at = point
    s1 = P1.laurent(at, terms) if not P1.is_zero() else (None, [])
    s0 = P0.laurent(at, terms) if not P0.is_zero() else (None, [])
    return _Series(*s1), _Series(*s0)


def katz_invariant(ode: LinearODE2, point) -> Fraction:
    """Largest slope of the Newton polygon of ``theta^2 + P1 theta + P0`` (0 when regular)."""
    s1, s0 = theta_form(ode, _as_point(ode, point), 1)
    k = Fraction(0)
    if s1.valuation is not None:
        k = max(k, Fraction(-s1.valuation))
    if s0.valuation is not None:
        k = max(k, Fraction(-s0.valuation, 2))
    return k


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponents:
    """Roots ``rho`` of ``rho^2 + p rho + q``; ``difference`` is ``rho_1 - rho_2`` when it lies in the field."""

    p: RationalFunction
    q: RationalFunction
    discriminant: RationalFunction
    root_of_discriminant: RationalFunction | None

    @property
    def field(self):
        return self.p.field

    def pair(self) -> tuple[QuadraticNumber, QuadraticNumber]:
        half = self.field.const(Fraction(1, 2))
        if self.root_of_discriminant is not None:
            r = self.root_of_discriminant
            return (QuadraticNumber(-self.p * half + r * half), QuadraticNumber(-self.p * half - r * half))
        return (QuadraticNumber(-self.p * half, half, self.discriminant),
                QuadraticNumber(-self.p * half, -half, self.discriminant))

    def integer_difference(self) -> int | None:
        """``|rho_1 - rho_2|`` if it is a rational integer, else ``None``."""
        r = self.root_of_discriminant
        if r is None or not r.is_rational_number():
            return None
        value = r.to_fraction()
        if value.denominator != 1:
            return None
        return abs(int(value))

    def ordered(self) -> tuple[RationalFunction, RationalFunction]:
        """``(rho_1, rho_2)`` with ``rho_1 - rho_2`` a nonnegative integer (requires one)."""
        m = self.integer_difference()
        if m is None:
            raise ValueError("exponent difference is not an integer")
        rho2 = (-self.p - m) / 2
        return rho2 + m, rho2

    def in_field(self) -> bool:
        return self.root_of_discriminant is not None

    def __str__(self):
        a, b = self.pair()
        return f"{a}, {b}"


def exponents(ode: LinearODE2, point) -> Exponents:
    point = _as_point(ode, point)
    s1, s0 = theta_form(ode, point, 1)
    zero = ode.field.zero()
    if (s1.valuation is not None and s1.valuation < 0) or (s0.valuation is not None and s0.valuation < 0):
        raise ValueError(f"{_point_label(point)} is not a regular singular point")
    p = s1.coeff(0, zero)
    q = s0.coeff(0, zero)
    d = p * p - 4 * q
    return Exponents(p, q, d, ode.field.sqrt(d))


# ---------------------------------------------------------------------------
# Frobenius
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrobeniusSolution:
    """``z^rho sum c_n z^n`` (plus ``kappa * y1 * log z`` for a log partner)."""

    point: object
    exponent: RationalFunction
    series: tuple[RationalFunction, ...]
    log_coefficient: RationalFunction | None = None
    log_partner_of: Optional["FrobeniusSolution"] = None

    @property
    def order(self) -> int:
        return len(self.series)


def _indicial(s1: _Series, s0: _Series, rho, zero):
    return rho * rho + s1.coeff(0, zero) * rho + s0.coeff(0, zero)


def _recurrence_rest(s1, s0, rho, coeffs, n, zero):
    acc = zero
    for k in range(1, n + 1):
        c = coeffs[n - k]
        if c.is_zero():
            continue
        acc = acc + (s1.coeff(k, zero) * (rho + (n - k)) + s0.coeff(k, zero)) * c
    return acc


def frobenius(ode: LinearODE2, point, rho, order: int = 20) -> FrobeniusSolution:
    """Coefficients ``c_0 = 1, ..., c_{order-1}`` of the series at exponent ``rho``.

    Raises ``ValueError`` when a resonance forces a logarithm.
    """
    point = _as_point(ode, point)
    rho = ode.field.const(rho) if not isinstance(rho, RationalFunction) else rho
    s1, s0 = theta_form(ode, point, order + 1)
    zero = ode.field.zero()
    if not _indicial(s1, s0, rho, zero).is_zero():
        raise ValueError(f"{rho} is not an exponent at {_point_label(point)}")
    coeffs = [ode.field.one()]
    for n in range(1, order):
        rest = _recurrence_rest(s1, s0, rho, coeffs, n, zero)
        f = _indicial(s1, s0, rho + n, zero)
        if f.is_zero():
            if not rest.is_zero():
                raise ValueError(f"logarithmic obstruction at step {n}")
            coeffs.append(zero)
        else:
            coeffs.append(-rest / f)
    return FrobeniusSolution(point, rho, tuple(coeffs))


def log_partner(ode: LinearODE2, point, order: int = 20) -> FrobeniusSolution:
    """Second solution ``kappa y1 log z + z^rho2 sum b_n z^n`` at a resonant point.

    ``y1`` belongs to the larger exponent.  ``kappa = 0`` means no logarithm.
    """
    point = _as_point(ode, point)
    ex = exponents(ode, point)
    rho1, rho2 = ex.ordered()
    m = int((rho1 - rho2).to_fraction())
    y1 = frobenius(ode, point, rho1, order + 1)
    s1, s0 = theta_form(ode, point, order + m + 1)
    zero = ode.field.zero()

    def g(j):
        if j < 0:
            return zero
        acc = 2 * (rho1 + j) * y1.series[j]
        for k in range(j + 1):
            acc = acc + s1.coeff(k, zero) * y1.series[j - k]
        return acc

    if m == 0:
        kappa = ode.field.one()
        b = [zero]
        start = 1
    else:
        b = [ode.field.one()]
        for n in range(1, m):
            b.append(-_recurrence_rest(s1, s0, rho2, b, n, zero) / _indicial(s1, s0, rho2 + n, zero))
        kappa = -_recurrence_rest(s1, s0, rho2, b, m, zero) / m
        b.append(zero)
        start = m + 1
    for n in range(start, order):
        rhs = -kappa * g(n - m) - _recurrence_rest(s1, s0, rho2, b, n, zero)
        b.append(rhs / _indicial(s1, s0, rho2 + n, zero))
    return FrobeniusSolution(point, rho2, tuple(b[:order]), kappa, y1)


def has_logarithm(ode: LinearODE2, point) -> bool:
    """True iff the local solutions at a regular singular point involve ``log z``."""
    point = _as_point(ode, point)
    ex = exponents(ode, point)
    m = ex.integer_difference()
    if m is None:
        return False
    if m == 0:
        return True
    rho1, rho2 = ex.ordered()
    s1, s0 = theta_form(ode, point, m + 1)
    zero = ode.field.zero()
    coeffs = [ode.field.one()]
    for n in range(1, m):
        coeffs.append(-_recurrence_rest(s1, s0, rho2, coeffs, n, zero) / _indicial(s1, s0, rho2 + n, zero))
    return not _recurrence_rest(s1, s0, rho2, coeffs, m, zero).is_zero()


def is_apparent(ode: LinearODE2, point) -> bool:
    """Distinct nonnegative integer exponents and no logarithm."""
    point = _as_point(ode, point)
    ex = exponents(ode, point)
    m = ex.integer_difference()
    if not m:
        return False
    rho1, rho2 = ex.ordered()
    if not rho2.is_rational_number():
        return False
    low = rho2.to_fraction()
    if low.denominator != 1 or low < 0:
        return False
    return not has_logarithm(ode, point)


# ---------------------------------------------------------------------------
# irregular points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialPart:
    """One formal branch ``exp(q) * zeta^(0) * (power)`` at an irregular point.

    ``q`` is ``sum q_terms[e] * zeta^(e/m)`` with ``zeta = t`` at infinity
    and ``zeta = 1/(t - c)`` at a finite point.  ``exponent`` is the power
    of ``t`` (infinity) or of ``t - c`` (finite point) multiplying the
    exponential.  ``eigenvalue`` is ``sum eigen_terms[e] * zeta^(e/m)``, the
    polynomial part of ``t u`` (resp. ``(t - c) u``) with ``u = v'/v``.
    """

    point: object
    m: int
    q_terms: dict
    exponent: RationalFunction
    eigen_terms: dict

    @property
    def field(self) -> ParamField:
        return self.exponent.field

    def q_is_zero(self) -> bool:
        return all(c.is_zero() for c in self.q_terms.values())

    def zeta(self) -> sympy.Expr:
        t = sympy.Symbol("t")
        return t if self.point is None else 1 / (t - self.point.to_expr())

    def q_expr(self) -> sympy.Expr:
        zeta = self.zeta()
        return sympy.expand(sum((c.to_expr() * zeta ** sympy.Rational(e, self.m) for e, c in self.q_terms.items()),
                                sympy.Integer(0)))

    def eigen_expr(self) -> sympy.Expr:
        zeta = self.zeta()
        return sympy.expand(sum((c.to_expr() * zeta ** sympy.Rational(e, self.m) for e, c in self.eigen_terms.items()),
                                sympy.Integer(0)))

    def q_function(self) -> RationalFunction:
        """``q`` as a ramified polynomial in ``t`` (infinity) or ``t^(-1)`` (point 0)."""
        field = self.field
        sign = 1
        if self.point is not None:
            if not self.point.is_zero():
                raise ValueError("q is not a function of t^(1/m) at a nonzero finite point")
            sign = -1
        s = RationalFunction(field, field._field.gens[0], self.m)
        total = RationalFunction(field, field._field.zero, self.m)
        for e, c in self.q_terms.items():
            total = total + c * s ** (sign * e)
        return total

    def __str__(self):
        return f"exp({sympy.sstr(self.q_expr())}) * power {self.exponent}"


def _expand_branches(s1: _Series, s0: _Series, katz: Fraction, field: ParamField, point):
    """Puiseux expansion of ``U = theta v / v`` down to the constant term, both branches."""
    m = katz.denominator
    r = katz.numerator
    zero = field.zero()

    def w_coeff(series, e):
        # coefficient of w^e where z = w^m
        if e % m:
            return zero
        return series.coeff(e // m, zero)

    p_lead = w_coeff(s1, -r)
    q_lead = w_coeff(s0, -2 * r)
    disc = p_lead * p_lead - 4 * q_lead
    if disc.is_zero():
        raise ValueError(f"degenerate leading term at {_point_label(point)}: deeper ramification needed")
    ext, root = field.with_root(disc, prefix="r")
    half = ext.const(Fraction(1, 2))
    p_lead, disc = ext.convert(p_lead), ext.convert(disc)
    s1 = _Series(s1.valuation, [ext.convert(c) for c in s1.coeffs])
    s0 = _Series(s0.valuation, [ext.convert(c) for c in s0.coeffs])
    ezero = ext.zero()

    def wc(series, e):
        if e % m:
            return ezero
        return series.coeff(e // m, ezero)

    branches = []
    for sign in (1, -1):
        lam = [(-p_lead + sign * root) * half]
        pivot = 2 * lam[0] + wc(s1, -r)
        for j in range(1, r + 1):
            order = -2 * r + j
            acc = wc(s0, order)
            for a in range(1, j):
                acc = acc + lam[a] * lam[j - a]
            for b in range(0, j):
                acc = acc + wc(s1, order - (-r + b)) * lam[b]
            if j - r >= 0:
                acc = acc + lam[j - r] * Fraction(-r + (j - r), m)
            lam.append(-acc / pivot)
        branches.append(lam)
    return ext, m, r, branches


def exponential_parts(ode: LinearODE2, point, unimodular: bool = False) -> list[ExponentialPart]:
    """Formal branches at an irregular point (empty when the point is regular)."""
    point = _as_point(ode, point)
    target = ode.unimodular() if unimodular else ode
    katz = katz_invariant(target, point)
    if katz == 0:
        return []
    r_needed = katz.numerator
    s1, s0 = theta_form(target, point, 2 * r_needed // katz.denominator + 4)
    ext, m, r, branches = _expand_branches(s1, s0, katz, target.field, point)
    parts = []
    for lam in branches:
        q_terms = {}
        eigen = {}
        for e in range(1, r + 1):
            q_terms[e] = lam[r - e] * Fraction(-m, e)
        sign = -1 if point is None else 1
        for e in range(0, r + 1):
            eigen[e] = sign * lam[r - e]
        exponent = sign * lam[r]
        parts.append(ExponentialPart(point if point is None else ext.convert(point), m, q_terms, exponent, eigen))
    return parts


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class SingularityReport:
    point: object
    kind: str
    exponents: Optional[tuple] = None
    has_logarithm: bool = False
    apparent: bool = False
    katz: Fraction = Fraction(0)
    exponential_parts: list = dc_field(default_factory=list)
    generalized_exponents: list = dc_field(default_factory=list)
    exponent_difference: Optional[str] = None
    notes: list = dc_field(default_factory=list)

    @property
    def label(self) -> str:
        return _point_label(self.point)

    def to_dict(self) -> dict:
        return {
            "point": self.label,
            "kind": self.kind,
            "exponents": None if self.exponents is None else [str(e) for e in self.exponents],
            "has_logarithm": self.has_logarithm,
            "apparent": self.apparent,
            "katz": str(self.katz),
            "exponential_parts": [sympy.sstr(p.q_expr()) for p in self.exponential_parts],
            "generalized_exponents": [sympy.sstr(p.eigen_expr()) for p in self.generalized_exponents],
            "exponent_difference": self.exponent_difference,
            "notes": list(self.notes),
        }


def _is_ordinary(ode: LinearODE2, point) -> bool:
    if point is None:
        return _ordinary_at_infinity(ode)
    for coeff in (ode.a1, ode.a0):
        if not coeff.is_zero() and coeff.valuation(point) < 0:
            return False
    return True


def classify_point(ode: LinearODE2, point) -> SingularityReport:
    _require_rational(ode)
    point = _as_point(ode, point)
    field = ode.field
    if _is_ordinary(ode, point):
        ex = (QuadraticNumber(field.zero()), QuadraticNumber(field.one()))
        return SingularityReport(point, "ordinary", ex, False, True, Fraction(0), exponent_difference="1")
    katz = katz_invariant(ode, point)
    if katz == 0:
        ex = exponents(ode, point)
        m = ex.integer_difference()
        log = has_logarithm(ode, point)
        report = SingularityReport(point, "regular_singular", ex.pair(), log, is_apparent(ode, point), katz)
        if ex.root_of_discriminant is not None:
            report.exponent_difference = str(ex.root_of_discriminant)
        else:
            report.exponent_difference = f"sqrt({ex.discriminant})"
        if m is None and ex.root_of_discriminant is not None and not ex.root_of_discriminant.is_rational_number():
            report.notes.append("exponent difference depends on parameters; generic values assumed")
        return report
    report = SingularityReport(point, "irregular_singular", katz=katz)
    try:
        report.exponential_parts = exponential_parts(ode, point)
        report.generalized_exponents = exponential_parts(ode, point, unimodular=True)
        report.exponents = tuple(QuadraticNumber(p.exponent) for p in report.exponential_parts)
    except ValueError as exc:
        report.notes.append(str(exc))
    return report


def analyze(ode: LinearODE2) -> list[SingularityReport]:
    return [classify_point(ode, p) for p in singular_points(ode) if not isinstance(p, AlgebraicPoint)]
