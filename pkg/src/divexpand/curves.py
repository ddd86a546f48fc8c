"""Deterministic term structures: piecewise-constant curves and the market state.

Rates, repo spreads and volatilities are all piecewise-constant in time, so
discount factors, carry factors and integrated variances have exact closed
forms (no quadrature error enters the pricing inputs).  Times are plain year
fractions; there is no calendar or day-count logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "PiecewiseConstantCurve",
    "MarketState",
    "discount_factor",
    "carry_factor",
    "integrated_variance",
]

CurveLike = Union[float, "PiecewiseConstantCurve", dict]


@dataclass(frozen=True)
class PiecewiseConstantCurve:
    """A right-continuous step function of time.

    ``values[i]`` applies on ``[breakpoints[i-1], breakpoints[i])``; the last
    value extends to infinity, so there is exactly one more value than
    breakpoints.  Breakpoints are strictly ascending and non-negative.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(bps) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("curve values must be finite")
        if any(b < 0.0 for b in bps):
            raise ValueError("breakpoints must be non-negative")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly ascending")
        # cumulative integrals of v and v^2 up to each breakpoint
        bp = np.asarray(bps)
        va = np.asarray(vals)
        widths = np.diff(np.concatenate(([0.0], bp)))
        object.__setattr__(self, "_bp", bp)
        object.__setattr__(self, "_vals", va)
        cum = np.concatenate(([0.0], np.cumsum(va[:-1] * widths)))
        cum_sq = np.concatenate(([0.0], np.cumsum(va[:-1] ** 2 * widths)))
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_cum_sq", cum_sq)

    @classmethod
    def flat(cls, value: float) -> "PiecewiseConstantCurve":
        return cls((), (float(value),))

    @classmethod
    def from_json(cls, obj: CurveLike) -> "PiecewiseConstantCurve":
        """Build from ``{"breakpoints": [...], "values": [...]}``.

        A bare number is shorthand for a flat curve.
        """
        if isinstance(obj, PiecewiseConstantCurve):
            return obj
        if isinstance(obj, (int, float)):
            return cls.flat(obj)
        return cls(tuple(obj["breakpoints"]), tuple(obj["values"]))

    def to_json(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @property
    def is_flat(self) -> bool:
        return len(self.values) == 1

    def value_at(self, t):
        """Level of the curve at time ``t`` (right-continuous)."""
        idx = np.searchsorted(self._bp, t, side="right")
        return self._vals[idx]

    def _check_time(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("time must be non-negative")
        return t

    def integral(self, t):
        """Exact ``∫_0^t value(s) ds``; accepts scalars or arrays."""
        t = self._check_time(t)
        idx = np.searchsorted(self._bp, t, side="right")
        left = np.concatenate(([0.0], self._bp))[idx]
        out = self._cum[idx] + self._vals[idx] * (t - left)
        return out if out.ndim else float(out)

    def square_integral(self, t):
        """Exact ``∫_0^t value(s)^2 ds``; accepts scalars or arrays."""
        t = self._check_time(t)
        idx = np.searchsorted(self._bp, t, side="right")
        left = np.concatenate(([0.0], self._bp))[idx]
        out = self._cum_sq[idx] + self._vals[idx] ** 2 * (t - left)
        return out if out.ndim else float(out)


def discount_factor(rate: PiecewiseConstantCurve, t):
    """Zero-coupon discount factor ``exp(-∫_0^t r ds)``."""
    return np.exp(-rate.integral(t))


def carry_factor(rate: PiecewiseConstantCurve, repo: PiecewiseConstantCurve, t):
    """Carry factor ``exp(-∫_0^t (r - q) ds)``; equals 1 when r == q."""
    return np.exp(-(rate.integral(t) - repo.integral(t)))


def integrated_variance(vol: PiecewiseConstantCurve, t):
    """Total variance ``∫_0^t σ^2 ds`` accumulated by time ``t``."""
    return vol.square_integral(t)


@dataclass(frozen=True)
class MarketState:
    """Spot plus rate, repo and volatility term structures."""

    spot: float
    rate: PiecewiseConstantCurve
    repo: PiecewiseConstantCurve
    vol: PiecewiseConstantCurve

    def __post_init__(self):
        if not (self.spot > 0.0 and math.isfinite(self.spot)):
            raise ValueError("spot must be positive and finite")
        if any(v <= 0.0 for v in self.vol.values):
            raise ValueError("volatility curve values must be positive")

    @classmethod
    def flat(cls, spot: float, vol: float, rate: float = 0.0, repo: float = 0.0) -> "MarketState":
        return cls(
            spot=float(spot),
            rate=PiecewiseConstantCurve.flat(rate),
            repo=PiecewiseConstantCurve.flat(repo),
            vol=PiecewiseConstantCurve.flat(vol),
        )

    @classmethod
    def from_json(cls, obj: dict) -> "MarketState":
        return cls(
            spot=float(obj["spot"]),
            rate=PiecewiseConstantCurve.from_json(obj.get("rate", 0.0)),
            repo=PiecewiseConstantCurve.from_json(obj.get("repo", 0.0)),
            vol=PiecewiseConstantCurve.from_json(obj["vol"]),
        )

    def to_json(self) -> dict:
        return {
            "spot": self.spot,
            "rate": self.rate.to_json(),
            "repo": self.repo.to_json(),
            "vol": self.vol.to_json(),
        }

    def discount(self, t):
        return discount_factor(self.rate, t)

    def carry(self, t):
        return carry_factor(self.rate, self.repo, t)

    def variance(self, t):
        return integrated_variance(self.vol, t)

    def total_vol(self, t):
        """``sqrt(∫_0^t σ^2 ds)``, the natural Black-formula input."""
        return np.sqrt(self.variance(t))
