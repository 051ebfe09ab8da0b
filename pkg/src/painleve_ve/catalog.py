"""Painleve equations, their Hamiltonians, and the derivation on the differential algebra.

Each family is written as ``x'' = R(x', x, t)`` together with a Hamiltonian
``H(x, y, t)`` of degree two in ``y``.  The Hamiltonians are rational in
``x`` (not the polynomial ones usually quoted) so that no square roots of
the parameters are needed; instantiation checks that eliminating ``y``
from Hamilton's equations gives back ``R``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .algebra import (
    VARIABLES,
    DenominatorVarietyError,
    ParamField,
    RationalFunction,
)

_x, _xp, _t, _y = sympy.symbols("x xp t y")
_TRANSFORMS = standard_transformations + (convert_xor,)


def parse_value(value) -> sympy.Expr:
    """Sympify with every identifier read as a plain symbol (``gamma`` is not the Gamma function)."""
    if isinstance(value, sympy.Basic):
        return value
    if not isinstance(value, str):
        return sympy.sympify(value)
    local = {name: sympy.Symbol(name) for name in re.findall(r"[A-Za-z_]\w*", value)}
    try:
        return parse_expr(value, local_dict=local, transformations=_TRANSFORMS)
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise ValueError(f"cannot parse {value!r}") from exc


def _sym(names: str):
    return sympy.symbols(names)


def _family_table():
    al, be, ga, de = _sym("alpha beta gamma delta")
    th0, th1 = _sym("theta0 theta1")
    x, xp, t, y = _x, _xp, _t, _y
    table = {}

    table["P1"] = ((), 6 * x**2 + t, y**2 / 2 - 2 * x**3 - t * x)

    table["P2"] = (
        ("alpha",),
        2 * x**3 + t * x + al,
        y**2 / 2 - (x**2 + t / 2) * y - (al + sympy.Rational(1, 2)) * x,
    )

    p3prime = (
        xp**2 / x - xp / t + x**2 * (al + ga * x) / (4 * t**2) + be / (4 * t) + de / (4 * x),
        x**2 * y**2 / t - (al * x + ga * x**2 / 2) / (8 * t) + be / (8 * x) + de * t / (16 * x**2),
    )
    for tag in ("P3prime", "P3prime_D6", "P3prime_D7", "P3prime_D8"):
        table[tag] = (("alpha", "beta", "gamma", "delta"),) + p3prime

    table["P3"] = (
        ("alpha", "beta", "gamma", "delta"),
        xp**2 / x - xp / t + (al * x**2 + be) / t + ga * x**3 + de / x,
        x**2 * y**2 / t - (al * x / 2 - be / (2 * x) + ga * t * x**2 / 4 - de * t / (4 * x**2)),
    )

    table["P4"] = (
        ("alpha", "beta"),
        xp**2 / (2 * x) + sympy.Rational(3, 2) * x**3 + 4 * t * x**2 + 2 * (t**2 - al) * x + be / x,
        x * y**2 - x**3 / 4 - t * x**2 - (t**2 - al) * x + be / (2 * x),
    )

    table["P5"] = (
        ("alpha", "beta", "gamma", "delta"),
        (1 / (2 * x) + 1 / (x - 1)) * xp**2 - xp / t
        + (x - 1) ** 2 / t**2 * (al * x + be / x) + ga * x / t + de * x * (x + 1) / (x - 1),
        x * (x - 1) ** 2 * y**2 / t - (al * x - be / x) / (2 * t) + ga / (2 * (x - 1))
        + de * t / 2 * (1 / (x - 1) + 1 / (x - 1) ** 2),
    )

    table["degP5"] = (
        ("theta0", "theta1"),
        (1 / (2 * x) + 1 / (2 * (x - 1))) * xp**2 - xp / t
        - 2 / t**2 * (th1**2 * x / (x - 1) - th0**2 * (x - 1) / x) + 8 * x * (x - 1),
        x * (x - 1) * y**2 / t - (1 / t) * (th1**2 / (x - 1) - th0**2 / x) - 4 * t * x,
    )

    table["P6"] = (
        ("alpha", "beta", "gamma", "delta"),
        (1 / x + 1 / (x - 1) + 1 / (x - t)) * xp**2 / 2
        - (1 / t + 1 / (t - 1) + 1 / (x - t)) * xp
        + x * (x - 1) * (x - t) / (t**2 * (t - 1) ** 2)
        * (al + be * t / x**2 + ga * (t - 1) / (x - 1) ** 2 + de * t * (t - 1) / (x - t) ** 2),
        x * (x - 1) * (x - t) * y**2 / (t * (t - 1))
        - (al * x - be * t / x - ga * (t - 1) / (x - 1) - de * t * (t - 1) / (x - t)) / (2 * t * (t - 1)),
    )
    return table


FAMILIES = _family_table()

#: fixed singular points of each family (``None`` is infinity)
FIXED_SINGULARITIES = {
    "P1": (None,),
    "P2": (None,),
    "P3": (0, None),
    "P3prime": (0, None),
    "P3prime_D6": (0, None),
    "P3prime_D7": (0, None),
    "P3prime_D8": (0, None),
    "P4": (None,),
    "P5": (0, None),
    "degP5": (0, None),
    "P6": (0, 1, None),
}


def family_params(family: str) -> tuple[str, ...]:
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    return FAMILIES[family][0]


@dataclass(frozen=True, eq=False)
class PainleveInstance:
    family: str
    params: dict
    field: ParamField
    R: RationalFunction
    den: RationalFunction
    H: RationalFunction

    def parse(self, text) -> RationalFunction:
        """Parse an expression in the instance field (extended by any new symbols)."""
        field = self.field
        if isinstance(text, RationalFunction):
            return text
        expr = parse_value(text)
        extra = sorted(str(s) for s in expr.free_symbols if str(s) not in field.names)
        if extra:
            return self.extend(extra).field.from_expr(expr)
        return field.from_expr(expr)

    def extend(self, params) -> "PainleveInstance":
        """Same instance over a field with extra parameters (e.g. an integration constant)."""
        params = [p for p in params if p not in self.field.names]
        if not params:
            return self
        field = self.field.extend(params)
        return PainleveInstance(self.family, dict(self.params), field, field.convert(self.R),
                                field.convert(self.den), field.convert(self.H))

    def over(self, field: ParamField) -> "PainleveInstance":
        return PainleveInstance(self.family, dict(self.params), field, field.convert(self.R),
                                field.convert(self.den), field.convert(self.H))

    @property
    def fixed_singularities(self):
        return FIXED_SINGULARITIES[self.family]

    def label(self) -> str:
        vals = ",".join(str(self.params[p]) for p in family_params(self.family))
        return f"{self.family}({vals})"


def _x_dependent_denominator(R: RationalFunction) -> RationalFunction:
    """Product of the denominator factors of ``R`` that involve ``x`` or ``x'``."""
    field = R.field
    ix, ixp = field.names.index("x"), field.names.index("xp")
    _, factors = R.value.denom.factor_list()
    out = field._field.one
    for factor, mult in factors:
        if factor.degree(ix) > 0 or factor.degree(ixp) > 0:
            out = out * field._field(factor) ** mult
    return RationalFunction(field, out)


def instantiate(family: str, params: Mapping[str, object] | None = None, *, check: bool = True) -> PainleveInstance:
    """Build a Painleve instance with the given parameter values.

    Parameter values may be numbers, strings or sympy expressions; any free
    symbols in them become generators of the parameter field.  Parameters
    that are not given stay symbolic.
    """
    names, r_expr, h_expr = FAMILIES[family][0], FAMILIES[family][1], FAMILIES[family][2]
    params = dict(params or {})
    unknown = set(params) - set(names)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)} for {family}")
    values = {}
    for name in names:
        if name in params:
            val = params[name]
            values[name] = parse_value(val)
        else:
            values[name] = sympy.Symbol(name)
    subs = {sympy.Symbol(n): v for n, v in values.items()}
    r_expr = r_expr.subs(subs)
    h_expr = h_expr.subs(subs)
    free = set()
    for v in values.values():
        free |= {str(s) for s in v.free_symbols}
    bad = free & set(VARIABLES)
    if bad:
        raise ValueError(f"parameter values may not use the reserved names {sorted(bad)}")
    field = ParamField(sorted(free))
    R = field.from_expr(sympy.together(r_expr))
    H = field.from_expr(sympy.together(h_expr))
    inst = PainleveInstance(family, {n: values[n] for n in names}, field, R, _x_dependent_denominator(R), H)
    if inst.den.is_zero():
        raise ValueError("degenerate parameters annihilate the denominator")
    if check:
        if H.degree("y") != 2 or H.partial("y").partial("y").partial("y") != 0:
            raise ValueError("Hamiltonian must be quadratic in y")
        if hamiltonian_elimination(H) != R:
            raise ValueError(f"Hamiltonian of {family} does not reproduce R")
    return inst


def hamiltonian_elimination(H: RationalFunction) -> RationalFunction:
    """Eliminate ``y`` from ``x' = H_y``, ``y' = -H_x`` and return ``x'' = R(x', x, t)``."""
    field = H.field
    Hy = H.partial("y")
    Hyy = Hy.partial("y")
    if Hyy.is_zero():
        raise ValueError("H_yy vanishes; y cannot be eliminated")
    y_of = (field.gen("xp") - Hy.substitute({"y": field.zero()})) / Hyy
    xpp = Hy.partial("t") + Hy.partial("x") * Hy + Hyy * (-H.partial("x"))
    return xpp.substitute({"y": y_of})


def derive_in_D(instance: PainleveInstance, expr) -> RationalFunction:
    """Derivation ``t' = 1``, ``x' = xp``, ``xp' = R``."""
    if not isinstance(expr, RationalFunction):
        expr = instance.parse(expr)
    if expr.field != instance.field:
        instance = instance.over(expr.field)
    if expr.depends_on("xpp") or expr.depends_on("y"):
        raise ValueError("expression must lie in K(t)[x', x, 1/den]")
    xp = instance.field.gen("xp")
    return expr.partial("t") + xp * expr.partial("x") + instance.R * expr.partial("xp")


def _denominator_check(instance: PainleveInstance, x0: RationalFunction) -> None:
    den0 = instance.den.substitute({"x": x0, "xp": x0.derive()})
    if den0.is_zero():
        raise DenominatorVarietyError("solution on denominator variety")


def verify_solution(instance: PainleveInstance, x0) -> RationalFunction:
    """Residual ``x0'' - R(x0', x0, t)``; zero iff ``x0`` solves the equation."""
    if not isinstance(x0, RationalFunction):
        x0 = instance.field.parse(x0) if isinstance(x0, str) else instance.field.const(x0)
    if x0.field != instance.field:
        x0 = instance.field.convert(x0)
    if x0.depends_on("x") or x0.depends_on("xp"):
        raise ValueError("solution must be a function of t only")
    _denominator_check(instance, x0)
    x0p = x0.derive()
    return x0p.derive() - instance.R.substitute({"x": x0, "xp": x0p})


@dataclass(frozen=True)
class FirstIntegralResult:
    generates_ideal: bool
    cofactor: RationalFunction | None

    def __bool__(self):
        return self.generates_ideal


def first_integral_check(instance: PainleveInstance, F) -> FirstIntegralResult:
    """Test whether ``(F)`` is a differential ideal: ``F' = lambda F`` with ``lambda`` in the algebra."""
    if not isinstance(F, RationalFunction):
        F = instance.parse(F)
    if F.is_zero():
        raise ValueError("F must be nonzero")
    inst = instance.over(F.field) if F.field != instance.field else instance
    lam = derive_in_D(inst, F) / F
    field = F.field
    ix, ixp = field.names.index("x"), field.names.index("xp")
    rest = lam.value.denom
    den = inst.den.value.numer
    while True:
        g = rest.gcd(den)
        if g.is_ground:
            break
        rest = rest.quo(g)
    ok = rest.degree(ix) <= 0 and rest.degree(ixp) <= 0
    return FirstIntegralResult(ok, lam if ok else None)
