"""Per-check residual statistics shared by the verification layers."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["ResidualReport"]


@dataclass
class ResidualReport:
    """Summary of one pointwise residual check.

    `fitted` holds named constants estimated during the check (least-squares
    scales, fitted Killing constants, recovered Reeb components, ...), all as
    plain floats so reports serialize directly to JSON.
    """

    check: str
    n_points: int
    max_abs: float
    mean_abs: float
    passed: bool
    tolerance: float | None = None
    fitted: dict[str, float] = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.mean_abs < 0 or self.max_abs < self.mean_abs - 1e-15:
            raise ValueError("need max_abs >= mean_abs >= 0")

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "n_points": self.n_points,
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "fitted": dict(sorted(self.fitted.items())),
            "pass": self.passed,
            "tolerance": self.tolerance,
            "note": self.note,
        }


def from_samples(check: str, samples, tolerance: float, n_points: int,
                 fitted: dict | None = None, note: str = "") -> ResidualReport:
    """Build a report from an iterable of nonnegative residual magnitudes."""
    vals = [float(s) for s in samples]
    if not vals:
        vals = [0.0]
    mx = max(vals)
    mn = sum(vals) / len(vals)
    return ResidualReport(check=check, n_points=n_points, max_abs=mx,
                          mean_abs=mn, passed=mx < tolerance,
                          tolerance=tolerance, fitted=fitted or {}, note=note)
