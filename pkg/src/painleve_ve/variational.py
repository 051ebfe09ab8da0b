"""First and second variational equations, and the Hamiltonian normal variational equation."""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import ExpPolyTerm, ParamField, RationalFunction, jet_substitute
from .catalog import PainleveInstance, _x_dependent_denominator, verify_solution
from .operators import LinearODE2, expterm_apply

PERTURBATION = ("v", "vp", "vpp")


class NotASolutionError(ValueError):
    """The base curve does not solve the Painleve equation."""


def _as_solution(instance: PainleveInstance, x0) -> RationalFunction:
    if isinstance(x0, RationalFunction):
        return instance.field.convert(x0)
    if isinstance(x0, str):
        return instance.field.parse(x0)
    return instance.field.const(x0)


def _checked(instance: PainleveInstance, x0) -> RationalFunction:
    x0 = _as_solution(instance, x0)
    residual = verify_solution(instance, x0)
    if not residual.is_zero():
        raise NotASolutionError(f"x0 = {x0} is not a solution (residual {residual})")
    return x0


def _linear_part(c1: RationalFunction) -> tuple[RationalFunction, RationalFunction, RationalFunction]:
    """Coefficients of ``vpp, vp, v`` in a form linear in the perturbation."""
    return c1.partial("vpp"), c1.partial("vp"), c1.partial("v")


def first_ve(instance: PainleveInstance, x0) -> LinearODE2:
    """Linearise ``x'' = R`` along ``x0``: the ``eps`` coefficient of ``x'' - R`` at ``x0 + eps v``."""
    x0 = _checked(instance, x0)
    field = instance.field
    equation = field.gen("xpp") - instance.R
    jet = jet_substitute(equation, x0, order=2)
    c2, c1, c0 = _linear_part(jet[1])
    return LinearODE2.from_coefficients(c2, c1, c0, notes=(f"VE of {instance.label()} along x0 = {x0}",))


@dataclass(frozen=True)
class SecondVE:
    """``w'' + a1 w' + a0 w = source(v, v', v'')`` with ``v`` solving the homogeneous part."""

    homogeneous: LinearODE2
    source: RationalFunction

    def is_quadratic_form(self) -> bool:
        """True iff the source is homogeneous of degree two in ``(v, v', v'')``."""
        field = self.source.field
        idx = [field.names.index(n) for n in PERTURBATION]
        if any(self.source.value.denom.degree(i) > 0 for i in idx):
            return False
        return all(sum(m[i] for i in idx) == 2 for m, _ in self.source.value.numer.terms())

    def coefficients(self) -> dict[tuple[str, str], RationalFunction]:
        """Coefficients ``c[(m1, m2)]`` of the monomials ``m1*m2`` of the source."""
        out = {}
        names = PERTURBATION
        for i, a in enumerate(names):
            for b in names[i:]:
                second = self.source.partial(a).partial(b)
                c = second / 2 if a == b else second
                if not c.is_zero():
                    out[(a, b)] = c
        return out

    def convert(self, field: ParamField) -> "SecondVE":
        return SecondVE(self.homogeneous.convert(field), field.convert(self.source))


def second_ve(instance: PainleveInstance, x0) -> SecondVE:
    """Second variational equation along ``x0``.

    With ``R = N/D`` and ``D`` the ``x``-dependent part of the denominator,
    the equation ``D x'' - N = 0`` is expanded at ``x0 + eps v`` (``w`` enters
    only linearly and reproduces the first VE); the source is minus the
    ``eps^2`` coefficient divided by ``D(x0)``.
    """
    x0 = _checked(instance, x0)
    field = instance.field
    den = _x_dependent_denominator(instance.R)
    equation = den * field.gen("xpp") - instance.R * den
    jet = jet_substitute(equation, x0, order=3)
    den0 = den.substitute({"x": x0, "xp": x0.derive()})
    c2, c1, c0 = _linear_part(jet[1])
    homogeneous = LinearODE2.from_coefficients(c2, c1, c0, notes=(f"VE of {instance.label()} along x0 = {x0}",))
    source = -jet[2] / den0
    return SecondVE(homogeneous, source)


def specialize_source(second: SecondVE, v0: ExpPolyTerm) -> ExpPolyTerm:
    """Substitute a homogeneous solution ``v0`` into the source."""
    field = v0.field
    if second.source.field != field:
        second = second.convert(field)
    residual = expterm_apply(second.homogeneous, v0)
    if not residual.is_zero():
        raise ValueError("v0 does not solve the homogeneous equation")
    derivs = {"v": v0, "vp": v0.derive()}
    derivs["vpp"] = derivs["vp"].derive()
    total = ExpPolyTerm(2 * v0.mu, 2 * v0.q, field.zero())
    for (a, b), c in second.coefficients().items():
        if c.k != 1:
            raise ValueError("ramified source; ramify first")
        total = total + (derivs[a] * derivs[b]) * c
    return total


# ---------------------------------------------------------------------------
# Hamiltonian side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearSystem4:
    """``Z' = M Z`` for ``Z = (w, v, a, b)``: variations of ``(y, x, z, e)``."""

    matrix: tuple[tuple[RationalFunction, ...], ...]

    def row(self, name: str) -> tuple[RationalFunction, ...]:
        return self.matrix[("w", "v", "a", "b").index(name)]

    def normal_block(self) -> tuple[tuple[RationalFunction, RationalFunction], tuple[RationalFunction, RationalFunction]]:
        """The ``(w, v)`` block left after setting ``a = b = 0``."""
        return (self.matrix[0][:2], self.matrix[1][:2])


def _hamiltonian_y0(H: RationalFunction, x0: RationalFunction) -> RationalFunction:
    field = H.field
    Hy = H.partial("y")
    Hyy = Hy.partial("y")
    if not Hyy.partial("y").is_zero():
        raise ValueError("H must be quadratic in y")
    y_of = (field.gen("xp") - Hy.substitute({"y": field.zero()})) / Hyy
    return y_of.substitute({"x": x0, "xp": x0.derive()})


def veh_system(instance: PainleveInstance, x0, hamiltonian: RationalFunction | None = None) -> LinearSystem4:
    """Variational system of ``H + e`` along ``(y0, x0, t, e0)``; ``e0`` is never needed."""
    H = instance.H if hamiltonian is None else instance.field.convert(hamiltonian)
    x0 = _as_solution(instance, x0)
    y0 = _hamiltonian_y0(H, x0)
    point = {"x": x0, "y": y0}

    def at(f):
        return f.substitute(point)

    Hx, Hy, Ht = H.partial("x"), H.partial("y"), H.partial("t")
    zero = instance.field.zero().lift(x0.k)
    w_row = (-at(Hx.partial("y")), -at(Hx.partial("x")), -at(Hx.partial("t")), zero)
    v_row = (at(Hy.partial("y")), at(Hy.partial("x")), at(Hy.partial("t")), zero)
    a_row = (zero, zero, zero, zero)
    b_row = (-at(Ht.partial("y")), -at(Ht.partial("x")), -at(Ht.partial("t")), zero)
    return LinearSystem4((w_row, v_row, a_row, b_row))


def hamiltonian_nve(instance: PainleveInstance, x0, hamiltonian: RationalFunction | None = None) -> LinearODE2:
    """Normal variational equation (``a = b = 0``) with ``w`` eliminated."""
    system = veh_system(instance, x0, hamiltonian)
    (p, q), (r, s) = system.normal_block()
    # w' = p w + q v, v' = r w + s v
    if r.is_zero():
        raise ValueError("H_yy vanishes along the solution; w cannot be eliminated")
    # w = (v' - s v)/r, so v'' = r' w + r w' + s' v + s v'
    rp, sp = r.derive(), s.derive()
    c1 = -(s + rp / r + p)
    c0 = -(sp + r * q - (rp / r + p) * s)
    one = r / r
    return LinearODE2.from_coefficients(one, c1, c0, notes=("normal variational equation of H + e",))


def prop31_check(instance: PainleveInstance, x0, hamiltonian: RationalFunction | None = None) -> bool:
    """True iff the Hamiltonian normal variational equation equals the first VE."""
    return hamiltonian_nve(instance, x0, hamiltonian).same_operator(first_ve(instance, x0))


__all__ = [
    "LinearSystem4",
    "NotASolutionError",
    "SecondVE",
    "first_ve",
    "hamiltonian_nve",
    "prop31_check",
    "second_ve",
    "specialize_source",
    "veh_system",
]
