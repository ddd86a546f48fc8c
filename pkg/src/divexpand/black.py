"""Black-76 pricing kernel: price, strike/forward derivatives, implied vol.

All functions work on the forward ``f``, strike ``k`` and the *total*
volatility ``v = sqrt(∫_0^T σ^2 ds)``; discounting is a plain multiplicative
factor ``df``.  ``eta`` is +1 for a call, -1 for a put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

__all__ = [
    "PricingError",
    "ImpliedVolError",
    "BlackInputs",
    "norm_cdf",
    "norm_pdf",
    "d1_d2",
    "black_price",
    "black_dk",
    "black_d2k",
    "black_d3k",
    "black_df",
    "black_d2f",
    "implied_total_vol",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# beyond this many standard deviations the CDF is 0/1 to double precision
_MONEYNESS_CUTOFF = 40.0


class PricingError(ValueError):
    """A pricing-domain error (invalid inputs, dividends exceeding the forward, ...)."""


class ImpliedVolError(PricingError):
    """The target price cannot be produced by any volatility (outside no-arbitrage bounds)."""


def norm_cdf(x):
    """Standard normal CDF, accurate to ~1e-16 absolute; accepts arrays."""
    return ndtr(x)


def norm_pdf(x):
    """Standard normal density; accepts arrays."""
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def _validate(f: float, k: float, v: float, df: float, eta: int) -> None:
    if not (f > 0.0 and k > 0.0):
        raise PricingError(f"forward and strike must be positive, got f={f}, k={k}")
    if v < 0.0:
        raise PricingError(f"total volatility must be non-negative, got {v}")
    if not (0.0 < df <= 1.0):
        raise PricingError(f"discount factor must lie in (0, 1], got {df}")
    if eta not in (1, -1):
        raise PricingError(f"eta must be +1 (call) or -1 (put), got {eta}")


def d1_d2(f: float, k: float, v: float) -> tuple[float, float]:
    """``d1 = ln(f/k)/v + v/2`` and ``d2 = d1 - v``.

    Raises for ``v <= 0``; callers must take the intrinsic branch themselves.
    """
    if not (f > 0.0 and k > 0.0):
        raise PricingError(f"forward and strike must be positive, got f={f}, k={k}")
    if v <= 0.0:
        raise PricingError("degenerate inputs: total volatility must be positive")
    d1 = math.log(f / k) / v + 0.5 * v
    return d1, d1 - v


def black_price(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """Undiscounted-forward option value times ``df``.

    ``v = 0`` and extreme moneyness (``|ln(f/k)|/v > 40``) return the
    discounted intrinsic value so the CDF never underflows into NaN land.
    """
    _validate(f, k, v, df, eta)
    if v == 0.0 or abs(math.log(f / k)) > _MONEYNESS_CUTOFF * v:
        return df * max(eta * (f - k), 0.0)
    d1, d2 = d1_d2(f, k, v)
    return eta * df * (f * ndtr(eta * d1) - k * ndtr(eta * d2))


def black_dk(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """First strike derivative ``-eta * df * Phi(eta * d2)``."""
    _validate(f, k, v, df, eta)
    d1, d2 = d1_d2(f, k, v)
    return -eta * df * float(ndtr(eta * d2))


def black_d2k(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """Second strike derivative ``df * phi(d2) / (k v)``: the terminal density, > 0."""
    _validate(f, k, v, df, eta)
    d1, d2 = d1_d2(f, k, v)
    return df * float(norm_pdf(d2)) / (k * v)


def black_d3k(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """Third strike derivative ``-df * phi(d2) (1 - d2/v) / (k^2 v)``."""
    _validate(f, k, v, df, eta)
    d1, d2 = d1_d2(f, k, v)
    return df * float(norm_pdf(d2)) * (d2 / v - 1.0) / (k * k * v)


def black_df(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """First forward derivative ``eta * df * Phi(eta * d1)``."""
    _validate(f, k, v, df, eta)
    d1, _ = d1_d2(f, k, v)
    return eta * df * float(ndtr(eta * d1))


def black_d2f(f: float, k: float, v: float, df: float = 1.0, eta: int = 1) -> float:
    """Second forward derivative ``df * phi(d1) / (f v)``, call/put alike."""
    _validate(f, k, v, df, eta)
    d1, _ = d1_d2(f, k, v)
    return df * float(norm_pdf(d1)) / (f * v)


def _corrado_miller_seed(f: float, k: float, call_value: float) -> float:
    """Initial total-vol guess from the Corrado-Miller rational approximation."""
    half_gap = 0.5 * (f - k)
    core = call_value - half_gap
    disc = core * core - (f - k) ** 2 / math.pi
    if disc > 0.0:
        seed = _SQRT_2PI / (f + k) * (core + math.sqrt(disc))
    else:
        # Brenner-Subrahmanyam fallback, adequate near the money
        seed = call_value * _SQRT_2PI / f
    return min(max(seed, 1e-4), 5.0)


def implied_total_vol(
    price: float,
    f: float,
    k: float,
    df: float = 1.0,
    eta: int = 1,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> float:
    """Invert :func:`black_price` for the total volatility ``v``.

    Safeguarded Newton on the out-of-the-money complement (the in-the-money
    option is mapped through put-call parity first, which keeps the problem
    well conditioned deep in the money), with a bisection fallback whenever a
    Newton step leaves the bracket.  Converges to
    ``|black_price(f,k,v,df,eta) - price| <= tol * max(1, price)``.

    Raises :class:`ImpliedVolError` when ``price`` violates the no-arbitrage
    bounds ``df*max(eta(f-k),0) <= price < df*(f if call else k)``.
    """
    _validate(f, k, 0.0, df, eta)
    intrinsic = df * max(eta * (f - k), 0.0)
    upper = df * (f if eta == 1 else k)
    if not math.isfinite(price) or price < intrinsic - 1e-12 * max(1.0, intrinsic):
        raise ImpliedVolError(f"price {price} below intrinsic value {intrinsic}")
    if price >= upper:
        raise ImpliedVolError(f"price {price} not below the upper bound {upper}")

    # work undiscounted on the OTM option: target is pure time value
    target = price / df - max(eta * (f - k), 0.0)
    otm_eta = eta if eta * (f - k) <= 0.0 else -eta
    if target <= 0.0:
        return 0.0

    tol_abs = tol * max(1.0, price) / df

    def value(v: float) -> float:
        d1 = math.log(f / k) / v + 0.5 * v
        d2 = d1 - v
        return otm_eta * (f * ndtr(otm_eta * d1) - k * ndtr(otm_eta * d2))

    call_equiv = target + max(f - k, 0.0)
    v = _corrado_miller_seed(f, k, call_equiv)

    lo, hi = 0.0, max(v, 1.0)
    for _ in range(200):
        if value(hi) >= target:
            break
        lo = hi
        hi *= 2.0
    else:  # pragma: no cover - unreachable inside the validated bounds
        raise ImpliedVolError("could not bracket the implied volatility")

    v = min(max(v, 1e-16), hi)
    for _ in range(max_iter):
        diff = value(v) - target
        if abs(diff) <= tol_abs:
            return v
        if diff > 0.0:
            hi = v
        else:
            lo = v
        d1 = math.log(f / k) / v + 0.5 * v
        vega = f * float(norm_pdf(d1))
        if vega > 1e-300:
            step = diff / vega
            candidate = v - step
        else:
            candidate = math.nan
        if not (lo < candidate < hi):
            candidate = 0.5 * (lo + hi)
        v = candidate
    raise ImpliedVolError(f"implied volatility did not converge within {max_iter} iterations")


@dataclass(frozen=True)
class BlackInputs:
    """Validated bundle of Black-76 inputs."""

    f: float
    k: float
    v: float
    df: float = 1.0
    eta: int = 1

    def __post_init__(self):
        _validate(self.f, self.k, self.v, self.df, self.eta)

    def price(self) -> float:
        return black_price(self.f, self.k, self.v, self.df, self.eta)

    def d_strike(self) -> float:
        return black_dk(self.f, self.k, self.v, self.df, self.eta)

    def d2_strike(self) -> float:
        return black_d2k(self.f, self.k, self.v, self.df, self.eta)

    def d3_strike(self) -> float:
        return black_d3k(self.f, self.k, self.v, self.df, self.eta)

    def d_forward(self) -> float:
        return black_df(self.f, self.k, self.v, self.df, self.eta)

    def d2_forward(self) -> float:
        return black_d2f(self.f, self.k, self.v, self.df, self.eta)
