"""Exact arithmetic kernel.

Every value lives in a sympy ``FracField`` over QQ.  The generators are the
independent variable ``t``, the differential-algebra variables
(``x, xp, xpp, y, v, vp, vpp``), the free parameters of the problem, and any
adjoined square roots.  A square root ``r`` carries the rewrite rule
``r**2 -> value``; after every operation numerators are reduced to degree at
most one in each root and roots are rationalised out of denominators, so the
cancelled fraction is a normal form and equality is decidable.

A :class:`RationalFunction` may be *ramified*: with ramification index ``k``
the generator ``t`` stands for ``t**(1/k)``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.fields import FracField

VARIABLES = ("t", "x", "xp", "xpp", "y", "v", "vp", "vpp")

_PARSE_TRANSFORMS = standard_transformations + (convert_xor,)


@lru_cache(maxsize=None)
def _frac_field(names: tuple[str, ...]) -> FracField:
    return FracField(names, QQ)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


class ParamField:
    """The exact coefficient field ``Q(params)[roots]`` together with ``t``.

    ``roots`` is a sequence of ``(name, value)`` pairs; each introduces a
    generator ``name`` with ``name**2 == value``.  Values must be free of
    root generators.
    """

    __slots__ = ("params", "roots", "_field", "_names", "_root_rules")

    def __init__(self, params: Iterable[str] = (), roots: Iterable[tuple[str, object]] = ()):
        self.params = tuple(params)
        self.roots = tuple((name, sympy.sympify(value)) for name, value in roots)
        self._names = VARIABLES + self.params + tuple(name for name, _ in self.roots)
        if len(set(self._names)) != len(self._names):
            raise ValueError(f"duplicate generator names in {self._names}")
        self._field = _frac_field(self._names)
        rules = []
        for name, value in self.roots:
            if value.free_symbols & {sympy.Symbol(n) for n, _ in self.roots}:
                raise ValueError(f"root value for {name} may not contain roots")
            index = self._names.index(name)
            rules.append((index, self._field.from_expr(value)))
        self._root_rules = tuple(rules)

    # -- identity ---------------------------------------------------------
    def _key(self):
        return (self.params, tuple((n, sympy.srepr(v)) for n, v in self.roots))

    def __eq__(self, other):
        return isinstance(other, ParamField) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        extra = "".join(f", {n}^2={v}" for n, v in self.roots)
        return f"ParamField(params={self.params}{extra})"

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def root_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.roots)

    # -- element construction --------------------------------------------
    def gen(self, name: str) -> "RationalFunction":
        try:
            index = self._names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a generator of {self!r}") from None
        return RationalFunction(self, self._field.gens[index])

    def const(self, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return self.convert(value)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, sympy.Basic):
            return RationalFunction(self, self._field.from_expr(value))
        frac = _as_fraction(value)
        return RationalFunction(self, self._field(QQ(frac.numerator, frac.denominator)))

    def zero(self) -> "RationalFunction":
        return RationalFunction(self, self._field.zero)

    def one(self) -> "RationalFunction":
        return RationalFunction(self, self._field.one)

    def symbols(self) -> dict[str, sympy.Symbol]:
        return {name: sympy.Symbol(name) for name in self._names}

    def parse(self, text: str) -> "RationalFunction":
        """Parse infix text such as ``"-t^(1/2)"`` or ``"s^2/2"``.

        Fractional powers of ``t`` produce a ramified result; ``I`` maps to
        the root ``i`` when the field has one.
        """
        local = self.symbols()
        if "i" in self.root_names:
            local["I"] = local["i"]
        try:
            expr = parse_expr(str(text), local_dict=local, transformations=_PARSE_TRANSFORMS)
        except (SyntaxError, TypeError, sympy.SympifyError) as exc:
            raise ValueError(f"cannot parse expression {text!r}") from exc
        return self.from_expr(expr)

    def from_expr(self, expr) -> "RationalFunction":
        expr = sympy.sympify(expr)
        unknown = {str(s) for s in expr.free_symbols} - set(self._names)
        if unknown:
            raise ValueError(f"unknown symbols {sorted(unknown)} for {self!r}")
        t = sympy.Symbol("t")
        k = 1
        for power in expr.atoms(sympy.Pow):
            if power.base == t and isinstance(power.exp, sympy.Rational):
                k = math.lcm(k, int(power.exp.q))
            elif power.base.has(t) and not power.exp.is_Integer:
                raise ValueError(f"unsupported power {power} in {expr}")
        if k > 1:
            tp = sympy.Symbol("t", positive=True)
            expr = sympy.powdenest(expr.subs(t, tp ** k), force=True).subs(tp, t)
        try:
            value = self._field.from_expr(expr)
        except (ValueError, sympy.polys.polyerrors.CoercionFailed) as exc:
            raise ValueError(f"{expr} is not rational in the field generators") from exc
        return RationalFunction(self, value, k)

    def convert(self, rf: "RationalFunction") -> "RationalFunction":
        if rf.field == self:
            return rf
        missing = set(str(s) for s in rf.value.as_expr().free_symbols) - set(self._names)
        if missing:
            raise ValueError(f"cannot convert: {sorted(missing)} not in {self!r}")
        return RationalFunction(self, rf.value.set_field(self._field), rf.k)

    # -- extensions -------------------------------------------------------
    def extend(self, params: Iterable[str] = (), roots: Iterable[tuple[str, object]] = ()) -> "ParamField":
        new_params = self.params + tuple(p for p in params if p not in self.params)
        return ParamField(new_params, tuple(self.roots) + tuple(roots))

    def without(self, params: Iterable[str]) -> "ParamField":
        drop = set(params)
        return ParamField([p for p in self.params if p not in drop], self.roots)

    def sqrt(self, value: "RationalFunction") -> "RationalFunction | None":
        """Exact square root of a root-free constant when it exists in the field."""
        if not value.is_constant():
            raise ValueError("sqrt is only defined for t-free elements here")
        if value.is_zero():
            return self.zero()
        if any(value.value.numer.degree(self._names.index(r)) > 0 or
               value.value.denom.degree(self._names.index(r)) > 0 for r in self.root_names):
            return None
        result = sympy.Integer(1)
        for part, sign in ((value.value.numer, 1), (value.value.denom, -1)):
            coeff, factors = sympy.factor_list(part.as_expr())
            coeff = sympy.Rational(coeff)
            if coeff < 0:
                return None
            num_root, num_exact = _isqrt(int(coeff.p))
            den_root, den_exact = _isqrt(int(coeff.q))
            if not (num_exact and den_exact):
                return None
            result *= (sympy.Rational(num_root, den_root)) ** sign
            for factor, mult in factors:
                if mult % 2:
                    return None
                result *= factor ** (sign * (mult // 2))
        return self.from_expr(result)

    def with_root(self, value: "RationalFunction", prefix: str = "r") -> tuple["ParamField", "RationalFunction"]:
        """Return ``(field', root)`` with ``root**2 == value`` in ``field'``.

        Perfect squares and rational multiples of existing roots are
        recognised, so no zero divisors are introduced.
        """
        value = self.convert(value)
        exact = self.sqrt(value)
        if exact is not None:
            return self, exact
        for name, existing in self.roots:
            ratio = value / self.from_expr(existing)
            scale = self.sqrt(ratio)
            if scale is not None:
                return self, scale * self.gen(name)
        index = 1
        while f"{prefix}{index}" in self._names:
            index += 1
        name = f"{prefix}{index}"
        field = self.extend(roots=[(name, value.to_expr())])
        return field, field.gen(name)

    # -- normal form ------------------------------------------------------
    def _normalize(self, frac):
        for index, value in self._root_rules:
            numer, denom = frac.numer, frac.denom
            if numer.degree(index) <= 1 and denom.degree(index) == 0:
                continue
            n0, n1 = self._split(numer, index, value)
            d0, d1 = self._split(denom, index, value)
            root = self._field.gens[index]
            if d1 == 0:
                frac = (n0 + root * n1) / d0
                continue
            norm = d0 * d0 - value * d1 * d1
            if norm == 0:
                raise ZeroDivisionError("root relation makes the denominator vanish")
            frac = ((n0 * d0 - value * n1 * d1) + root * (n1 * d0 - n0 * d1)) / norm
        return frac

    def _split(self, poly, index, value):
        even = self._field.zero
        odd = self._field.zero
        ring = poly.ring
        for monom, coeff in poly.terms():
            exponent = monom[index]
            rest = list(monom)
            rest[index] = 0
            term = self._field(ring.from_dict({tuple(rest): coeff}))
            if exponent >= 2:
                term = term * value ** (exponent // 2)
            if exponent % 2:
                odd += term
            else:
                even += term
        return even, odd


def _isqrt(n: int) -> tuple[int, bool]:
    if n < 0:
        return 0, False
    r = math.isqrt(n)
    return r, r * r == n


class RationalFunction:
    """An exact element of ``K(t^(1/k))[x, xp, ...]`` in normal form."""

    __slots__ = ("field", "value", "k")

    def __init__(self, field: ParamField, value, k: int = 1):
        if k < 1:
            raise ValueError("ramification index must be positive")
        self.field = field
        self.value = field._normalize(value)
        self.k = k

    # -- helpers ----------------------------------------------------------
    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")
            return other
        return self.field.const(other)

    def _align(self, other):
        other = self._coerce(other)
        if self.k == other.k:
            return self, other
        k = math.lcm(self.k, other.k)
        return self.lift(k), other.lift(k)

    def _new(self, value, k=None):
        return RationalFunction(self.field, value, self.k if k is None else k)

    @property
    def _tgen(self):
        return self.field._field.ring.gens[0]

    def lift(self, k: int) -> "RationalFunction":
        """Re-express in the variable ``t**(1/k)``; ``k`` must be a multiple of ``self.k``."""
        if k == self.k:
            return self
        if k % self.k:
            raise ValueError(f"cannot lift ramification {self.k} to {k}")
        m = k // self.k
        tg = self._tgen
        numer = self.value.numer.compose(tg, tg ** m)
        denom = self.value.denom.compose(tg, tg ** m)
        return RationalFunction(self.field, self.field._field(numer) / self.field._field(denom), k)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b = self._align(other)
        return a._new(a.value + b.value)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(other)
        return a._new(a.value - b.value)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        a, b = self._align(other)
        return a._new(a.value * b.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._align(other)
        if b.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return a._new(a.value / b.value)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return self._new(self.field._field.one)
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return self._new(self.value ** n)
        return self._new(self.value ** n)

    def __eq__(self, other):
        if not isinstance(other, (RationalFunction, int, Fraction, sympy.Rational)):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except ValueError:
            return False

    def __hash__(self):
        return hash((str(self.value.as_expr()), self.k))

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        return sympy.sstr(sympy.factor(self.to_expr()))

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.value.numer

    def is_constant(self) -> bool:
        """True when free of ``t`` (parameters and roots allowed)."""
        return self.value.numer.degree(0) <= 0 and self.value.denom.degree(0) <= 0

    def is_rational_number(self) -> bool:
        return self.value.numer.is_ground and self.value.denom.is_ground

    def to_fraction(self) -> Fraction:
        if not self.is_rational_number():
            raise ValueError(f"{self} is not a rational number")
        num = self.value.numer.LC if self.value.numer else 0
        den = self.value.denom.LC
        return Fraction(int(num.numerator), int(num.denominator)) / Fraction(
            int(den.numerator), int(den.denominator))

    def free_names(self) -> set[str]:
        return {str(s) for s in self.value.as_expr().free_symbols}

    def depends_on(self, name: str) -> bool:
        index = self.field.names.index(name)
        return self.value.numer.degree(index) > 0 or self.value.denom.degree(index) > 0

    def is_polynomial_in_t(self) -> bool:
        return self.value.denom.degree(0) <= 0

    # -- structure --------------------------------------------------------
    def numerator(self) -> "RationalFunction":
        return self._new(self.field._field(self.value.numer))

    def denominator(self) -> "RationalFunction":
        return self._new(self.field._field(self.value.denom))

    def degree(self, name: str = "t") -> int:
        """Degree of the numerator in ``name`` (``-1`` style ``-oo`` for zero)."""
        index = self.field.names.index(name)
        return self.value.numer.degree(index)

    def t_coefficients(self, which: str = "numer") -> dict[int, "RationalFunction"]:
        """Split numerator or denominator as ``sum c_j t**j`` with t-free ``c_j``."""
        poly = self.value.numer if which == "numer" else self.value.denom
        ring = poly.ring
        out: dict[int, object] = {}
        for monom, coeff in poly.terms():
            j = monom[0]
            rest = (0,) + tuple(monom[1:])
            out[j] = out.get(j, ring.zero) + ring.from_dict({rest: coeff})
        field = self.field._field
        return {j: RationalFunction(self.field, field(p)) for j, p in out.items()}

    def to_expr(self, var: str = "t") -> sympy.Expr:
        expr = self.value.as_expr()
        t = sympy.Symbol("t")
        if self.k > 1:
            return expr.subs(t, sympy.Symbol(var) ** sympy.Rational(1, self.k))
        if var != "t":
            return expr.subs(t, sympy.Symbol(var))
        return expr

    def to_radical_expr(self, var: str = "t") -> sympy.Expr:
        """``to_expr`` with every adjoined root written as a sympy square root."""
        roots = {sympy.Symbol(n): sympy.sqrt(v) for n, v in self.field.roots}
        return self.to_expr(var).subs(roots)

    # -- calculus ---------------------------------------------------------
    def partial(self, name: str) -> "RationalFunction":
        """Partial derivative with respect to a generator (ramified ``t`` keeps its meaning as the raw variable)."""
        index = self.field.names.index(name)
        return self._new(self.value.diff(self.field._field.gens[index]))

    def derive(self) -> "RationalFunction":
        """Exact ``d/dt``; for ramified functions ``d/dt = (1/(k s^(k-1))) d/ds``."""
        ds = self.value.diff(self.field._field.gens[0])
        if self.k == 1:
            return self._new(ds)
        s = self.field._field.gens[0]
        return self._new(ds / (self.k * s ** (self.k - 1)))

    # -- substitution -----------------------------------------------------
    def substitute(self, mapping: Mapping[str, object]) -> "RationalFunction":
        """Replace generators by field elements.

        Values may be ramified; the raw generator ``t`` of ``self`` is
        re-expressed in the common ramified variable unless ``"t"`` itself is
        mapped.
        """
        values = {name: self._coerce(val) for name, val in mapping.items()}
        k = math.lcm(self.k, *[v.k for v in values.values()])
        values = {n: v.lift(k) for n, v in values.items()}
        if "t" not in values:
            values["t"] = RationalFunction(self.field, self.field._field.gens[0], self.k).lift(k)
        gens = self.field._field.gens
        table = [values[n].value if n in values else gens[i] for i, n in enumerate(self.field.names)]

        def evaluate(poly):
            total = self.field._field.zero
            cache: dict[tuple[int, int], object] = {}
            for monom, coeff in poly.terms():
                term = self.field._field(coeff)
                for i, e in enumerate(monom):
                    if e:
                        if (i, e) not in cache:
                            cache[(i, e)] = table[i] ** e
                        term = term * cache[(i, e)]
                total += term
            return total

        numer = evaluate(self.value.numer)
        denom = evaluate(self.value.denom)
        if not denom.numer:
            raise ZeroDivisionError("substitution annihilates the denominator")
        return RationalFunction(self.field, numer / denom, k)

    def specialize(self, values: Mapping[str, object], field: ParamField | None = None) -> "RationalFunction":
        """Substitute parameter values and move into ``field`` (default: drop those params)."""
        target = field or self.field.without(values)
        return target.convert(self.substitute(values))

    # -- local expansions -------------------------------------------------
    def laurent(self, point=None, terms: int = 8) -> tuple[int, list["RationalFunction"]]:
        """Laurent expansion at ``point`` (a constant) or at infinity (``None``).

        Returns ``(valuation, coeffs)`` with
        ``self = sum(coeffs[i] * z**(valuation + i)) + O(z**(valuation + terms))``
        where ``z = t - point`` or ``z = 1/t``.  Zero returns ``(None, [])``.
        """
        if self.k != 1:
            raise ValueError("ramify before expanding")
        if self.is_zero():
            return None, []
        num = self.t_coefficients("numer")
        den = self.t_coefficients("denom")
        zero = self.field.zero()
        if point is None:
            dn, dd = max(num), max(den)
            nser = [num.get(dn - i, zero) for i in range(dn + 1)]
            dser = [den.get(dd - i, zero) for i in range(dd + 1)]
            shift = dd - dn
        else:
            p = self._coerce(point)
            nser = _taylor_shift(num, p)
            dser = _taylor_shift(den, p)
            shift = 0
        nv = next(i for i, c in enumerate(nser) if not c.is_zero())
        dv = next(i for i, c in enumerate(dser) if not c.is_zero())
        nser, dser = nser[nv:], dser[dv:]
        valuation = shift + nv - dv
        coeffs: list[RationalFunction] = []
        d0 = dser[0]
        for i in range(terms):
            acc = nser[i] if i < len(nser) else zero
            for j in range(1, min(i, len(dser) - 1) + 1):
                acc = acc - dser[j] * coeffs[i - j]
            coeffs.append(acc / d0)
        return valuation, coeffs

    def valuation(self, point=None) -> int | None:
        return self.laurent(point, 1)[0]


def _taylor_shift(coeffs: dict[int, RationalFunction], p: RationalFunction) -> list[RationalFunction]:
    """Coefficients of ``sum c_j (z+p)^j`` in ascending powers of ``z``."""
    degree = max(coeffs)
    zero = p.field.zero()
    out = []
    for i in range(degree + 1):
        acc = zero
        for j in range(i, degree + 1):
            c = coeffs.get(j)
            if c is not None and not c.is_zero():
                acc = acc + c * math.comb(j, i) * p ** (j - i)
        out.append(acc)
    return out


def rf_arith(lhs: RationalFunction, rhs: RationalFunction, op: str) -> RationalFunction:
    """Binary field operation by name: ``add``, ``sub``, ``mul`` or ``div``."""
    ops = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
        "div": lambda a, b: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](lhs, rhs)


def rf_derive(f: RationalFunction) -> RationalFunction:
    return f.derive()


# ---------------------------------------------------------------------------
# Truncated jets
# ---------------------------------------------------------------------------


class JetPolynomial:
    """``c0 + c1 eps + ... + c_{n-1} eps^(n-1)`` with ``eps^n = 0``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[RationalFunction]):
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def constant(cls, value: RationalFunction, order: int) -> "JetPolynomial":
        zero = value.field.zero()
        return cls([value] + [zero] * (order - 1))

    def _lift(self, other) -> "JetPolynomial":
        if isinstance(other, JetPolynomial):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return JetPolynomial.constant(self.coeffs[0]._coerce(other), self.order)

    def __add__(self, other):
        other = self._lift(other)
        return JetPolynomial([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return JetPolynomial([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return JetPolynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        other = self._lift(other)
        n = self.order
        out = []
        for m in range(n):
            acc = self.coeffs[0] * other.coeffs[m]
            for i in range(1, m + 1):
                acc = acc + self.coeffs[i] * other.coeffs[m - i]
            out.append(acc)
        return JetPolynomial(out)

    __rmul__ = __mul__

    def inverse(self) -> "JetPolynomial":
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ZeroDivisionError("jet with vanishing base is not invertible")
        inv0 = 1 / c0
        out = [inv0]
        for m in range(1, self.order):
            acc = self.coeffs[1] * out[m - 1]
            for i in range(2, m + 1):
                acc = acc + self.coeffs[i] * out[m - i]
            out.append(-acc * inv0)
        return JetPolynomial(out)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, n: int):
        result = JetPolynomial.constant(self.coeffs[0].field.one(), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def base(self) -> RationalFunction:
        return self.coeffs[0]

    def __getitem__(self, m: int) -> RationalFunction:
        return self.coeffs[m]


class DenominatorVarietyError(ValueError):
    """The substituted solution makes the denominator vanish identically."""


def jet_evaluate(expr: RationalFunction, assignment: Mapping[str, JetPolynomial], order: int) -> JetPolynomial:
    """Evaluate ``expr`` with generators replaced by jets.

    Generators missing from ``assignment`` stay as constants (the ``t``
    generator is lifted to the ramification of the jets).
    """
    field = expr.field
    k = math.lcm(expr.k, *[c.k for jet in assignment.values() for c in jet.coeffs])
    gens = field._field.gens
    table = {}
    for i, name in enumerate(field.names):
        if name in assignment:
            table[i] = JetPolynomial([c.lift(k) for c in assignment[name].coeffs])
        elif name == "t":
            table[i] = JetPolynomial.constant(RationalFunction(field, gens[0], expr.k).lift(k), order)
        else:
            table[i] = JetPolynomial.constant(RationalFunction(field, gens[i], k), order)

    def evaluate(poly):
        total = JetPolynomial.constant(RationalFunction(field, field._field.zero, k), order)
        cache = {}
        for monom, coeff in poly.terms():
            term = JetPolynomial.constant(RationalFunction(field, field._field(coeff), k), order)
            for i, e in enumerate(monom):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = table[i] ** e
                    term = term * cache[(i, e)]
            total = total + term
        return total

    numer = evaluate(expr.value.numer)
    denom = evaluate(expr.value.denom)
    if denom.base().is_zero():
        raise DenominatorVarietyError("solution on denominator variety")
    return numer / denom


def jet_substitute(expr: RationalFunction, x0: RationalFunction, order: int = 2,
                   perturbation: Sequence[str] = ("v", "vp", "vpp")) -> JetPolynomial:
    """Substitute ``x -> x0 + eps v`` (with ``x' -> x0' + eps v'``, ``x'' -> x0'' + eps v''``)."""
    if order not in (2, 3):
        raise ValueError("order must be 2 or 3")
    field = expr.field
    zero = field.zero()
    x0p = x0.derive()
    x0pp = x0p.derive()
    v, vp, vpp = (field.gen(n) for n in perturbation)

    def jet(base, first):
        return JetPolynomial([base, first] + [zero] * (order - 2))

    assignment = {"x": jet(x0, v), "xp": jet(x0p, vp), "xpp": jet(x0pp, vpp)}
    return jet_evaluate(expr, assignment, order)


# ---------------------------------------------------------------------------
# Exponential-polynomial terms
# ---------------------------------------------------------------------------


class ExpPolyTerm:
    """``t**mu * exp(q(t)) * p(t)``.

    ``mu`` is a t-free field element, ``q`` a polynomial in ``t``; ``p``
    is a polynomial for solution terms (residuals may carry poles).  The
    representation is normalised so that ``t`` divides neither the
    numerator nor the denominator of ``p``: powers of ``t`` are absorbed
    into ``mu``.
    """

    __slots__ = ("mu", "q", "p")

    def __init__(self, mu, q, p):
        field = p.field if isinstance(p, RationalFunction) else q.field
        mu = field.const(mu) if not isinstance(mu, RationalFunction) else mu
        q = field.const(q) if not isinstance(q, RationalFunction) else q
        p = field.const(p) if not isinstance(p, RationalFunction) else p
        if not mu.is_constant():
            raise ValueError("mu must be free of t")
        if not q.is_polynomial_in_t() or q.k != 1 or p.k != 1:
            raise ValueError("q must be an unramified polynomial in t")
        if not p.is_zero():
            val = p.valuation(field.zero())
            if val:
                p = p / field.gen("t") ** val
                mu = mu + val
        self.mu, self.q, self.p = mu, q, p

    @property
    def field(self) -> ParamField:
        return self.p.field

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def derive(self) -> "ExpPolyTerm":
        t = self.field.gen("t")
        p = self.p
        return ExpPolyTerm(self.mu - 1, self.q, t * p.derive() + (t * self.q.derive() + self.mu) * p)

    def __mul__(self, other):
        if isinstance(other, ExpPolyTerm):
            return ExpPolyTerm(self.mu + other.mu, self.q + other.q, self.p * other.p)
        return ExpPolyTerm(self.mu, self.q, self.p * other)

    __rmul__ = __mul__

    def __add__(self, other: "ExpPolyTerm") -> "ExpPolyTerm":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if not (self.q - other.q).is_zero():
            raise ValueError("cannot add terms with different exponentials")
        shift = self.mu - other.mu
        if not shift.is_rational_number() or shift.to_fraction().denominator != 1:
            raise ValueError("cannot add terms whose t-exponents differ by a non-integer")
        n = int(shift.to_fraction())
        t = self.field.gen("t")
        if n >= 0:
            return ExpPolyTerm(other.mu, self.q, self.p * t ** n + other.p)
        return ExpPolyTerm(self.mu, self.q, self.p + other.p * t ** (-n))

    def __eq__(self, other):
        if not isinstance(other, ExpPolyTerm):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (self.mu - other.mu).is_zero() and (self.q - other.q).is_zero() and self.p == other.p

    def __repr__(self):
        return f"ExpPolyTerm(mu={self.mu}, q={self.q}, p={self.p})"

    def to_expr(self) -> sympy.Expr:
        t = sympy.Symbol("t")
        return t ** self.mu.to_expr() * sympy.exp(self.q.to_expr()) * self.p.to_expr()


# ---------------------------------------------------------------------------
# Quadratic numbers
# ---------------------------------------------------------------------------


class QuadraticNumber:
    """``a + b*sqrt(d)`` with ``a, b, d`` t-free field elements."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: RationalFunction, b: RationalFunction | None = None, d: RationalFunction | None = None):
        zero = a.field.zero()
        self.a = a
        self.b = zero if b is None else b
        self.d = zero if d is None else d
        if self.d.is_zero():
            self.b = zero

    def is_rational(self) -> bool:
        return self.b.is_zero()

    def __sub__(self, other: "QuadraticNumber") -> "QuadraticNumber":
        if other.b.is_zero():
            return QuadraticNumber(self.a - other.a, self.b, self.d)
        if self.b.is_zero():
            return QuadraticNumber(self.a - other.a, -other.b, other.d)
        if not (self.d - other.d).is_zero():
            raise ValueError("different radicands")
        return QuadraticNumber(self.a - other.a, self.b - other.b, self.d)

    def __add__(self, other: "QuadraticNumber") -> "QuadraticNumber":
        return self - QuadraticNumber(-other.a, -other.b, other.d)

    def integer_value(self) -> int | None:
        """The value as an integer when it is one, else ``None``."""
        if not self.b.is_zero() or not self.a.is_rational_number():
            return None
        value = self.a.to_fraction()
        return int(value) if value.denominator == 1 else None

    def to_expr(self) -> sympy.Expr:
        return self.a.to_expr() + self.b.to_expr() * sympy.sqrt(self.d.to_expr())

    def __str__(self):
        return sympy.sstr(sympy.simplify(self.to_expr()))

    __repr__ = __str__
