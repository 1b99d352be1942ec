"""Result record shared by every bound evaluator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class BoundResult:
    """A probability (or other) bound with its audit trail.

    ``raw`` is the formula value before clamping, ``value`` is what should be
    used. For exponential tails ``raw = prefactor * exp(-exponent)`` and the
    exponent is kept so it can be inspected directly. ``clamped`` is set when
    the raw value was outside ``[0, 1]`` and the bound is therefore vacuous.
    """

    value: float
    raw: float
    variant: str
    exponent: float | None = None
    clamped: bool = False
    one_sided: bool = False
    inputs: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def to_dict(self, digits: int | None = None) -> dict:
        def r(x):
            if x is None or digits is None or not isinstance(x, float):
                return x
            if not math.isfinite(x):
                return x
            return float(f"{x:.{digits}g}")

        return {
            "variant": self.variant,
            "inputs": {k: r(v) if isinstance(v, float) else v for k, v in self.inputs.items()},
            "exponent": r(self.exponent),
            "raw": r(self.raw),
            "value": r(self.value),
            "clamped": self.clamped,
            "one_sided": self.one_sided,
        }


def clamp_probability(raw: float, variant: str, **kw) -> BoundResult:
    value = min(1.0, max(0.0, raw))
    return BoundResult(value=value, raw=raw, variant=variant, clamped=(value != raw), **kw)


def exp_tail(exponent: float, variant: str, one_sided: bool = False, **kw) -> BoundResult:
    """``min(1, c * exp(-exponent))`` with ``c = 1`` one-sided, 2 otherwise."""
    pref = 1.0 if one_sided else 2.0
    raw = pref * math.exp(-exponent) if exponent != math.inf else 0.0
    return clamp_probability(raw, variant, exponent=exponent, one_sided=one_sided, **kw)
