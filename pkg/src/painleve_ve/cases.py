"""The worked cases: Painleve instance, algebraic solution, printed VE and expected verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .catalog import PainleveInstance, instantiate
from .galois import BOREL, FINITE, SL2, TORUS
from .operators import LinearODE2


@dataclass(frozen=True)
class ExpectedVerdict:
    values: tuple[tuple[str, str], ...]
    group: str
    witnesses: tuple[tuple[str, str], ...] = ()

    @property
    def specialization(self) -> dict[str, str]:
        return dict(self.values)

    def label(self) -> str:
        if not self.values:
            return "generic"
        return ", ".join(f"{k}={v}" for k, v in self.values)


@dataclass(frozen=True)
class CaseRecord:
    """``expected_ve`` holds the printed ``(c2, c1, c0)`` of ``c2 v'' + c1 v' + c0 v = 0``."""

    key: str
    family: str
    params: tuple[tuple[str, str], ...]
    solution: str
    expected_ve: tuple[str, str, str]
    expected_verdicts: tuple[ExpectedVerdict, ...] = ()
    expected_source: str | None = None
    informational: tuple[str, ...] = ()
    ramification: int = 1
    notes: str = ""

    @property
    def section(self) -> str:
        return self.key.split(":", 1)[0]

    def instance(self) -> PainleveInstance:
        return instantiate(self.family, dict(self.params))

    def printed_ve(self, instance: PainleveInstance | None = None) -> LinearODE2:
        inst = instance or self.instance()
        c2, c1, c0 = (inst.parse(c) for c in self.expected_ve)
        return LinearODE2.from_coefficients(c2, c1, c0, notes=(f"printed VE for {self.key}",))


def _v(group: str, witnesses: tuple[tuple[str, str], ...] = (), **values) -> ExpectedVerdict:
    return ExpectedVerdict(tuple((k, str(v)) for k, v in values.items()), group, witnesses)


_LOG0_EXPOO = (("log_at", "0"), ("exp_at", "oo"), ("riccati_solutions", "0"))

SCAN_VALUES = tuple(Fraction((2 * n + 1) ** 2, 32) for n in range(6))

CASES: tuple[CaseRecord, ...] = (
    CaseRecord(
        "4.1:P2(0)", "P2", (("alpha", "0"),), "0",
        ("1", "0", "-t"),
        (_v(SL2, (("exp_at", "oo"), ("riccati_solutions", "0"))),),
        notes="Airy equation",
    ),
    CaseRecord(
        "4.2:P4(0,-2/9)", "P4", (("alpha", "0"), ("beta", "-2/9")), "-2*t/3",
        ("1", "-1/t", "4*t^2/3"),
        (_v(TORUS, (("exp_at", "oo"), ("riccati_solutions", "2"))),),
        expected_source="3/2*v*vpp/t - 3/4*vp^2/t + 3*t*v^2",
    ),
    CaseRecord(
        "4.3:P4(0,-2)", "P4", (("alpha", "0"), ("beta", "-2")), "-2*t",
        ("1", "-1/t", "-4*t^2"),
        (_v(TORUS, (("exp_at", "oo"), ("riccati_solutions", "2"))),),
        expected_source="1/2*v*vpp/t - 1/4*vp^2/t - 7*t*v^2",
    ),
    CaseRecord(
        "4.4:P3prime_D6(a,-a,4,-4)", "P3prime_D6",
        (("alpha", "a"), ("beta", "-a"), ("gamma", "4"), ("delta", "-4")), "-t^(1/2)",
        ("1", "0", "1/(4*t^2) + a/2*t^(-3/2) - 4/t"),
        tuple(_v(SL2, _LOG0_EXPOO, a=a) for a in (1, 2, -3)),
        ramification=2,
    ),
    CaseRecord(
        "4.5:P3prime_D7(0,-2,2,0)", "P3prime_D7",
        (("alpha", "0"), ("beta", "-2"), ("gamma", "2"), ("delta", "0")), "t^(1/3)",
        ("-t^(1/3)", "-1/3*t^(-2/3)", "-1/9*t^(-5/3) + 3/2/t"),
        (_v(SL2, _LOG0_EXPOO),),
        ramification=3,
    ),
    CaseRecord(
        "4.6:P3prime_D8(8h,-8h,0,0)", "P3prime_D8",
        (("alpha", "8*h"), ("beta", "-8*h"), ("gamma", "0"), ("delta", "0")), "-t^(1/2)",
        ("1", "0", "4*h*t^(-3/2) + 1/(4*t^2)"),
        tuple(_v(SL2, _LOG0_EXPOO, h=h) for h in (1, "1/2")),
        ramification=2,
    ),
    CaseRecord(
        "4.7:P5(a,-a,0,delta)", "P5",
        (("alpha", "a"), ("beta", "-a"), ("gamma", "0"), ("delta", "delta")), "-1",
        ("1", "1/t", "-8*a/t^2 - delta/2"),
        tuple(_v(TORUS, (("exp_at", "oo"), ("riccati_solutions", "2")), a=a, delta=2) for a in SCAN_VALUES)
        + tuple(_v(SL2, (("exp_at", "oo"), ("riccati_solutions", "0")), a=a, delta=2) for a in ("1/8", 1, "5/32")),
        expected_source="3/2*v*vpp - vp^2 + 3/2*v*vp/t - (16*a/t^2 + delta)*v^2",
    ),
    CaseRecord(
        "4.8:P5(s^2/2,-1/2,-s,-1/2)", "P5",
        (("alpha", "s^2/2"), ("beta", "-1/2"), ("gamma", "-s"), ("delta", "-1/2")), "-t/s+1",
        ("1", "(s-2*t)/(t*(t-s))", "((s-t)^3-s-2*t)/(t^2*(t-s))"),
        tuple(_v(SL2, (("log_at", "s"), ("exp_at", "oo"), ("riccati_solutions", "0")), s=s) for s in (2, 3, "1/2")),
        notes="the derived zeroth-order coefficient has +2t where the printed one has -2t",
    ),
    CaseRecord(
        "4.9:degP5(1/2)", "degP5", (("theta0", "1/2"),), "1-theta1/(2*t)",
        ("1", "(4*t-3*theta1)/(t*(2*t-theta1))",
         "-(32*t^3-32*t^2*theta1+8*t*theta1^2+theta1)/(t^2*(2*t-theta1))"),
        tuple(_v(SL2, (("log_at", "0"), ("apparent_at", "theta1/2"), ("exp_at", "oo"), ("riccati_solutions", "0")),
                 theta1=th) for th in (1, 2)),
        informational=("a0",),
        notes="the printed zeroth-order coefficient is compared for information only",
    ),
)

BY_SECTION = {c.section: c for c in CASES}
BY_KEY = {c.key: c for c in CASES}


def get_case(key: str) -> CaseRecord:
    """Look a case up by full key (``4.2:P4(0,-2/9)``) or section (``4.2``)."""
    if key in BY_KEY:
        return BY_KEY[key]
    if key in BY_SECTION:
        return BY_SECTION[key]
    raise KeyError(f"unknown case {key!r}; known: {', '.join(BY_SECTION)}")


__all__ = ["BY_KEY", "BY_SECTION", "CASES", "CaseRecord", "ExpectedVerdict", "SCAN_VALUES", "get_case", "BOREL", "FINITE"]
