"""Machine-readable scheme/Bell reports.

Numbers are rounded to 9 significant digits and values below 1e-12 in
magnitude are written as 0, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

from fourphoton._version import __version__
from fourphoton.bell import (
    CorrelationTensor,
    PhaseSettings,
    bell_verdict,
    correlation_tensor,
    critical_visibility,
)
from fourphoton.postselect import SchemeResult

SIG_DIGITS = 9
ZERO_TOL = 1e-12

REPORT_KEYS = (
    "scheme",
    "register",
    "probability",
    "settings",
    "q_tensor",
    "lhv_sum",
    "violated",
    "margin",
    "critical_visibility",
    "version",
)

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": list(REPORT_KEYS),
    "additionalProperties": False,
    "properties": {
        "scheme": {"type": "string"},
        "register": {
            "type": "object",
            "patternProperties": {
                "^[HV]+$": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
            },
            "additionalProperties": False,
        },
        "probability": {"type": "number", "minimum": 0, "maximum": 1},
        "settings": {
            "type": ["array", "null"],
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "q_tensor": {"type": ["array", "null"], "items": {"type": "number"}},
        "lhv_sum": {"type": ["number", "null"]},
        "violated": {"type": ["boolean", "null"]},
        "margin": {"type": ["number", "null"]},
        "critical_visibility": {"type": ["number", "null"]},
        "version": {"type": "string"},
    },
}


def fmt(x: float) -> float:
    """Round to ``SIG_DIGITS`` significant digits; flush tiny values to 0."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in report")
    if abs(x) < ZERO_TOL:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}")


@dataclass(frozen=True)
class Report:
    scheme: str
    register: dict[str, tuple[float, float]]
    probability: float
    settings: tuple[tuple[float, float], ...] | None = None
    q_tensor: tuple[float, ...] | None = None
    lhv_sum: float | None = None
    violated: bool | None = None
    margin: float | None = None
    critical_visibility: float | None = None
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "scheme": self.scheme,
            "register": {k: [fmt(re), fmt(im)] for k, (re, im) in self.register.items()},
            "probability": fmt(self.probability),
            "settings": None if self.settings is None else [[fmt(a), fmt(b)] for a, b in self.settings],
            "q_tensor": None if self.q_tensor is None else [fmt(x) for x in self.q_tensor],
            "lhv_sum": None if self.lhv_sum is None else fmt(self.lhv_sum),
            "violated": self.violated,
            "margin": None if self.margin is None else fmt(self.margin),
            "critical_visibility": (
                None if self.critical_visibility is None else fmt(self.critical_visibility)
            ),
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Report:
        missing = [k for k in REPORT_KEYS if k not in d]
        if missing:
            raise ValueError(f"report is missing keys {missing}")
        return cls(
            scheme=d["scheme"],
            register={k: (float(v[0]), float(v[1])) for k, v in d["register"].items()},
            probability=float(d["probability"]),
            settings=None if d["settings"] is None else tuple((a, b) for a, b in d["settings"]),
            q_tensor=None if d["q_tensor"] is None else tuple(d["q_tensor"]),
            lhv_sum=d["lhv_sum"],
            violated=d["violated"],
            margin=d["margin"],
            critical_visibility=d["critical_visibility"],
            version=d["version"],
        )

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"scheme: {d['scheme']}", f"probability: {d['probability']}", "register:"]
        lines += [f"  {k}: {re:+.9g} {im:+.9g}i" for k, (re, im) in d["register"].items()]
        if d["settings"] is not None:
            lines.append("settings (rad): " + "; ".join(f"{a:.9g},{b:.9g}" for a, b in d["settings"]))
            lines.append("q_tensor: " + " ".join(f"{x:.9g}" for x in d["q_tensor"]))
            for key in ("lhv_sum", "violated", "margin", "critical_visibility"):
                lines.append(f"{key}: {d[key]}")
        lines.append(f"version: {d['version']}")
        return "\n".join(lines) + "\n"


def build_report(
    name: str, result: SchemeResult, settings: PhaseSettings | None = None
) -> tuple[Report, CorrelationTensor | None]:
    register = {
        bits: (a.real, a.imag) for bits, a in result.register.as_dict(tol=ZERO_TOL).items()
    }
    if settings is None:
        return Report(name, register, result.success_probability), None
    tensor = correlation_tensor(result.register, settings)
    verdict = bell_verdict(tensor)
    visibility = critical_visibility(tensor) if verdict.sum > ZERO_TOL else None
    report = Report(
        scheme=name,
        register=register,
        probability=result.success_probability,
        settings=settings.phases,
        q_tensor=tuple(tensor.flat()),
        lhv_sum=verdict.sum,
        violated=verdict.violated,
        margin=verdict.margin,
        critical_visibility=visibility,
    )
    return report, tensor
