"""Published coefficient systems and parameter sets, kept as audit inputs.

Transcription notes: the published ``+-`` is carried by the sign symbol
``pm``; the Burgers speed is stored exactly as printed even though it fails
back-substitution (the audit reports that).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..symexpr import Expr, Num, format_expr, parse, to_poly
from .engine import PRINTED, AlgebraicSystem, ParamSet

PRINTED_SYSTEMS: dict[str, tuple[str, ...]] = {
    "burgers": (
        "c*A0 - A*k^2*A1*q + k*A0^2",
        "c*A1 + 2*k*A0*A1 - A*k^2*A1*r",
        "k*A1^2 - A*k^2*A1*p",
    ),
    "coupled-burgers": (
        "-A1*q*r - 2*A1*A0*q - L*B1*A0*q - L*A1*B0*q - c*A1*q",
        "-2*A1^2*q - 2*A1*p*q - A1*r^2 - 2*A1*A0*r - c*A1*r - L*A1*B0*r - L*A0*B1*r - 2*L*A1*B1*q",
        "-2*L*B1*A1*r - 2*A1*A0*p - 2*A1^2*r - c*A1*p - 3*A1*p*r - L*p*B1*A0 - L*p*B0*A1",
        "-2*A1*p^2 - 2*A1^2*p - 2*L*B1*A1*p",
        "-B1*q*r - 2*B1*B0*q - M*B1*A0*q - M*A1*B0*q - c*B1*q",
        "-2*B1^2*q - 2*B1*p*q - B1*r^2 - 2*B1*B0*r - c*B1*r - M*B1*A0*r - M*A1*B0*r - 2*M*A1*B1*q",
        "-2*M*B1*A1*r - 2*B1*B0*p - 2*B1^2*r - c*B1*p - 3*B1*p*r - M*p*B1*A0 - M*p*B0*A1",
        "-2*B1*p^2 - 2*B1^2*p - 2*M*B1*A1*p",
    ),
}

_CHI = "(-(60*p*q + 15*r^2) + pm*sqrt(105*r^4 - 1680*p^2*q^2 - 840*p*q*r^2))/20"

_PRINTED_SETS: dict[str, tuple[tuple[str, dict[str, str], tuple[str, ...]], ...]] = {
    "burgers": (
        (
            "burgers-printed",
            {
                "A1": "p*A*k",
                "c": "-A*k^2*(r + pm*sqrt(r^2 - 4*p*q))",
                "A0": "A*k*(r + pm*sqrt(r^2 - 4*p*q))/2",
            },
            ("pm",),
        ),
    ),
    "coupled-burgers": (
        (
            "coupled-printed",
            {
                "A1": "-p*(-1 + L)/(-1 + L*M)",
                "B1": "-p*(-1 + M)/(-1 + L*M)",
                "c": "-(2*L*M*B0 - r + M*r - 2*B0)/(-1 + M)",
                "A0": "(-1 + L)*B0/(-1 + M)",
            },
            (),
        ),
    ),
    "foam-drainage": (
        (
            "foam-printed",
            {"A1": "k*p", "c": "-k^3*p*q + 1/4*k^3*r^2", "A0": "k*r/2"},
            (),
        ),
    ),
    "sawada-kotera": (
        (
            "sk-set1",
            {
                "A2": "-6*k^2*p^2",
                "A1": "-6*k^2*p*r",
                "c": "k^4*(-8*p*q*r^2 + r^4 + 16*p^2*q^2)",
                "A0": "-6*k^2*p*q",
            },
            (),
        ),
        (
            "sk-set2",
            {
                "A2": "-6*k^2*p^2",
                "A1": "-6*k^2*p*r",
                "c": f"(-5/2*k^4*r^2 + 10*k^4*p*q)*{_CHI} - 11*k^4*r^2*q*p"
                " - 1/2*k^4*r^4 + 52*k^4*p^2*q^2",
                "A0": f"{_CHI}*k^2",
            },
            ("pm",),
        ),
    ),
}


def printed_param_sets(equation: str) -> list[ParamSet]:
    out = []
    for label, values, signs in _PRINTED_SETS.get(equation, ()):
        out.append(ParamSet.from_strings(values, provenance=PRINTED, label=label, sign_symbols=signs))
    return out


def printed_system(equation: str) -> tuple[Expr, ...]:
    return tuple(parse(s) for s in PRINTED_SYSTEMS[equation])


@dataclass(frozen=True)
class SystemComparison:
    label: str
    status: str  # equal | negated | scaled | mismatch | missing
    factor: str = "1"
    difference: str = "0"

    def to_json(self) -> dict:
        d = {"equation": self.label, "status": self.status}
        if self.status == "scaled":
            d["factor"] = self.factor
        if self.status in ("mismatch", "missing"):
            d["difference"] = self.difference
        return d


def compare_systems(computed: AlgebraicSystem, printed) -> list[SystemComparison]:
    """Compare equation by equation, up to a constant rational factor."""
    rows = []
    n = max(len(computed.equations), len(printed))
    for i in range(n):
        label = computed.labels[i] if i < len(computed.labels) else f"printed[{i}]"
        if i >= len(computed.equations) or i >= len(printed):
            have = computed.equations[i] if i < len(computed.equations) else printed[i]
            rows.append(SystemComparison(label, "missing", difference=format_expr(have)))
            continue
        a, b = to_poly(computed.equations[i]), to_poly(printed[i])
        if (a - b).is_zero():
            rows.append(SystemComparison(label, "equal"))
            continue
        if (a + b).is_zero():
            rows.append(SystemComparison(label, "negated", factor="-1"))
            continue
        ratio = _constant_ratio(a, b)
        if ratio is not None:
            rows.append(SystemComparison(label, "scaled", factor=format_expr(Num(ratio))))
            continue
        rows.append(SystemComparison(label, "mismatch", difference=format_expr((a - b).to_expr())))
    return rows


def _constant_ratio(a, b):
    if a.is_zero() or b.is_zero() or set(a.terms) != set(b.terms):
        return None
    m = next(iter(a.terms))
    r = a.terms[m] / b.terms[m]
    if all(a.terms[k] == r * b.terms[k] for k in a.terms):
        return r
    return None
