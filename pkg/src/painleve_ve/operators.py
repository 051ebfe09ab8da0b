"""Second-order linear differential operators ``v'' + a1 v' + a0 v``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Mapping

import sympy

from .algebra import ExpPolyTerm, ParamField, RationalFunction


@dataclass(frozen=True, eq=False)
class LinearODE2:
    """Monic operator ``v'' + a1 v' + a0 v`` (``= rhs`` when ``rhs`` is set).

    The ramification index of the coefficients is the one of the
    variable: with ``k > 1`` the coefficients live in ``K(t^(1/k))`` but
    the derivative is still ``d/dt``.  ``leading`` keeps the original
    leading coefficient before normalisation, for provenance only.
    """

    a1: RationalFunction
    a0: RationalFunction
    rhs: RationalFunction | None = None
    leading: RationalFunction | None = None
    variable: str = "t"
    notes: tuple[str, ...] = dc_field(default_factory=tuple)

    def __post_init__(self):
        if self.a1.field != self.a0.field:
            raise ValueError("coefficients must share a field")
        k = math.lcm(self.a1.k, self.a0.k)
        object.__setattr__(self, "a1", self.a1.lift(k))
        object.__setattr__(self, "a0", self.a0.lift(k))

    @classmethod
    def from_coefficients(cls, c2, c1, c0, **kwargs) -> "LinearODE2":
        """Normalise ``c2 v'' + c1 v' + c0 v`` to monic form."""
        if c2.is_zero():
            raise ValueError("leading coefficient vanishes")
        return cls(c1 / c2, c0 / c2, leading=c2, **kwargs)

    @property
    def field(self) -> ParamField:
        return self.a1.field

    @property
    def k(self) -> int:
        return self.a1.k

    def is_homogeneous(self) -> bool:
        return self.rhs is None

    def apply(self, f: RationalFunction) -> RationalFunction:
        fp = f.derive()
        return fp.derive() + self.a1 * fp + self.a0 * f

    def riccati(self, u: RationalFunction) -> RationalFunction:
        """``u' + u^2 + a1 u + a0``; zero iff ``v'/v = u`` defines a solution."""
        return u.derive() + u * u + self.a1 * u + self.a0

    def unimodular(self) -> "LinearODE2":
        """Normal form ``v'' + (a0 - a1^2/4 - a1'/2) v`` reached by ``v -> exp(-1/2 int a1) v``."""
        a1 = self.a1
        return LinearODE2(a1 * 0, self.a0 - a1 * a1 / 4 - a1.derive() / 2, variable=self.variable,
                          notes=self.notes + ("unimodular form",))

    def convert(self, field: ParamField) -> "LinearODE2":
        rhs = field.convert(self.rhs) if self.rhs is not None else None
        lead = field.convert(self.leading) if self.leading is not None else None
        return LinearODE2(field.convert(self.a1), field.convert(self.a0), rhs, lead, self.variable, self.notes)

    def specialize(self, values: Mapping[str, object], field: ParamField | None = None) -> "LinearODE2":
        target = field or self.field.without(values)
        spec = lambda f: None if f is None else f.specialize(values, target)
        return LinearODE2(spec(self.a1), spec(self.a0), spec(self.rhs), spec(self.leading), self.variable, self.notes)

    def same_operator(self, other: "LinearODE2") -> bool:
        if self.field != other.field:
            try:
                other = other.convert(self.field)
            except ValueError:
                return False
        return self.a1 == other.a1 and self.a0 == other.a0

    def to_expr(self):
        v = sympy.Function("v")(sympy.Symbol(self.variable))
        t = sympy.Symbol(self.variable)
        lhs = v.diff(t, 2) + self.a1.to_expr(self.variable) * v.diff(t) + self.a0.to_expr(self.variable) * v
        return lhs

    def __str__(self):
        var = self.variable
        a1 = sympy.factor(self.a1.to_expr(var))
        a0 = sympy.factor(self.a0.to_expr(var))
        text = f"v'' + ({sympy.sstr(a1)}) v' + ({sympy.sstr(a0)}) v"
        if self.rhs is not None:
            text += f" = {sympy.sstr(sympy.factor(self.rhs.to_expr(var)))}"
        else:
            text += " = 0"
        return text

    def poles(self) -> RationalFunction:
        """Product of the coefficient denominators (in the raw variable)."""
        return self.a1.denominator() * self.a0.denominator()


def ramify(ode: LinearODE2, k: int) -> LinearODE2:
    """Rewrite ``ode`` in ``s = t^(1/k)`` with ``d/ds``; the result is rational in ``s``.

    With ``t = s^k`` one has ``d/dt = (1/(k s^(k-1))) d/ds``, which gives
    ``v_ss + (-(k-1)/s + k s^(k-1) a1) v_s + k^2 s^(2k-2) a0 v = 0``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k % ode.k:
        raise ValueError(f"coefficients need t^(1/{ode.k}); cannot ramify with k={k}")
    if k == 1:
        return ode
    a1 = ode.a1.lift(k)
    a0 = ode.a0.lift(k)
    field = ode.field
    s = RationalFunction(field, field._field.gens[0], 1)
    a1 = RationalFunction(field, a1.value, 1)
    a0 = RationalFunction(field, a0.value, 1)
    b1 = -(k - 1) / s + k * s ** (k - 1) * a1
    b0 = k * k * s ** (2 * k - 2) * a0
    rhs = None
    if ode.rhs is not None:
        rhs = k * k * s ** (2 * k - 2) * RationalFunction(field, ode.rhs.lift(k).value, 1)
    return LinearODE2(b1, b0, rhs, variable="s", notes=ode.notes + (f"ramified k={k}",))


def unramify(ode: LinearODE2, k: int) -> LinearODE2:
    """Inverse of :func:`ramify`: back to ``d/dt`` with coefficients in ``t^(1/k)``."""
    if ode.k != 1:
        raise ValueError("expected an ODE rational in its variable")
    field = ode.field
    s = RationalFunction(field, field._field.gens[0], 1)
    a1 = (ode.a1 + (k - 1) / s) / (k * s ** (k - 1))
    a0 = ode.a0 / (k * k * s ** (2 * k - 2))
    rhs = None if ode.rhs is None else ode.rhs / (k * k * s ** (2 * k - 2))
    return LinearODE2(RationalFunction(field, a1.value, k), RationalFunction(field, a0.value, k),
                      None if rhs is None else RationalFunction(field, rhs.value, k))


def expterm_apply(ode: LinearODE2, term: ExpPolyTerm) -> ExpPolyTerm:
    """Residual ``L(term)`` as an exp-poly term with the same ``(mu mod Z, q)``."""
    if not ode.is_homogeneous():
        raise ValueError("expterm_apply needs a homogeneous operator")
    if ode.k != 1:
        raise ValueError("ramify the operator before applying exp-poly terms")
    field = term.field
    if ode.field != field:
        ode = ode.convert(field)
    d1 = term.derive()
    d2 = d1.derive()
    return d2 + d1 * ode.a1 + term * ode.a0
