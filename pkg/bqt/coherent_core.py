"""Closed-form algebra of the multipartite coherent channel.

The channel is the superposition N(|eta>^n + e^{i m pi}|-eta>^n) of ``n``
coherent modes with overlap ``p = <eta|-eta>``.  Everything here is written
in the logical basis of even/odd coherent states; the pair basis is ordered
``(ee, eo, oe, oo)`` in every module of the package.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import DEGENERATE_TOL
from .errors import DegenerateChannel, OutOfRange


class LimitTag:
    """Names returned by :func:`classify_limit`."""

    GHZ = "GHZ"
    GROUND = "Ground"
    W = "W"
    GENERIC = "Generic"


@dataclass(frozen=True)
class ChannelParams:
    """Overlap ``p``, mode count ``n`` and parity index ``m`` of the channel."""

    p: float
    n: int
    m: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise OutOfRange(f"n must be an integer, got {self.n!r}")
        if isinstance(self.m, bool) or int(self.m) != self.m:
            raise OutOfRange(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRange(f"overlap p must lie in [0, 1], got {self.p}")
        if self.n < 2:
            raise OutOfRange(f"mode count n must be >= 2, got {self.n}")

    @property
    def cos_m(self) -> float:
        """cos(m pi), exactly +1 or -1."""
        return 1.0 if self.m % 2 == 0 else -1.0


@dataclass(frozen=True)
class LogicalEncoding:
    """Amplitudes of ``|eta> = a|eta_e> + b|eta_o>``."""

    a: float
    b: float


@dataclass(frozen=True)
class SplitCoefficients:
    """Amplitudes of the (r, n-r) split in the basis ``00, 01, 10, 11``."""

    g00: complex
    g01: complex
    g10: complex
    g11: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.g00, self.g01, self.g10, self.g11], dtype=complex)


def power(p: float, k: int) -> float:
    """Return ``p**k`` with the convention ``0**0 == 1``."""
    if k == 0:
        return 1.0
    return p ** k


def one_plus(p: float, k: int, sign: float) -> float:
    """Return ``1 + sign * p**k`` without cancellation near ``p = 1``."""
    if k == 0 or p == 0.0 or sign > 0:
        return 1.0 + sign * power(p, k)
    return -math.expm1(k * math.log(p))


def _channel_denominator(params: ChannelParams) -> float:
    denom = one_plus(params.p, params.n, params.cos_m)
    if denom <= DEGENERATE_TOL:
        raise DegenerateChannel(
            f"1 + p^n cos(m pi) vanishes at p={params.p}, n={params.n}, m={params.m}; "
            "use p = 1 - eps"
        )
    return denom


def normalization_factor(params: ChannelParams) -> float:
    """Return ``N = [2 + 2 p^n cos(m pi)]^(-1/2)`` for ``params``."""
    return 1.0 / math.sqrt(2.0 * _channel_denominator(params))


def multipartite_state_norm(params: ChannelParams) -> float:
    """Return the squared norm ``N^2 (2 + 2 p^n cos m pi)`` of the channel state."""
    n_sq = normalization_factor(params) ** 2
    return n_sq * 2.0 * one_plus(params.p, params.n, params.cos_m)


def logical_encoding(p: float) -> LogicalEncoding:
    """Return ``(a, b)`` with ``a^2 = (1+p)/2`` and ``b^2 = (1-p)/2``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"overlap p must lie in [0, 1], got {p}")
    return LogicalEncoding(a=math.sqrt((1.0 + p) / 2.0), b=math.sqrt((1.0 - p) / 2.0))


def split_coefficients(params: ChannelParams, r: int) -> SplitCoefficients:
    """Return the normalised amplitudes of the ``(r, n-r)`` bipartite split."""
    if not 1 <= r <= params.n - 1:
        raise OutOfRange(f"split index r must lie in [1, {params.n - 1}], got {r}")
    norm = normalization_factor(params)
    p = params.p
    phase = params.cos_m

    def a_k(k: int) -> float:
        return math.sqrt(one_plus(p, k, 1.0) / 2.0)

    def b_k(k: int) -> float:
        return math.sqrt(one_plus(p, k, -1.0) / 2.0)

    rest = params.n - r
    raw = np.array(
        [
            norm * (1 + phase) * a_k(r) * a_k(rest),
            norm * (1 - phase) * a_k(r) * b_k(rest),
            norm * (1 - phase) * a_k(rest) * b_k(r),
            norm * (1 + phase) * b_k(r) * b_k(rest),
        ],
        dtype=complex,
    )
    raw = raw / np.linalg.norm(raw)
    return SplitCoefficients(*raw)


def lambda_factor(params: ChannelParams) -> float:
    """Return ``3 + p^2 + (3p^2 + 1) p^(n-2) cos(m pi)``."""
    p = params.p
    return 3.0 + p * p + (3.0 * p * p + 1.0) * power(p, params.n - 2) * params.cos_m


def reduced_pair_state(params: ChannelParams) -> np.ndarray:
    """Return the two-mode reduction rho_12 of the channel.

    Built from ``|+-eta, +-eta> = (a|eta_e> +- b|eta_o>)^(x)2`` and the
    coherence weight ``p^(n-2) e^{-i m pi}``.  Regrouping the four outer
    products into the parity-even and parity-odd sums keeps every factor
    ``1 +- p^k cos(m pi)`` free of cancellation, so the trace stays one even
    when the normalisation blows up near the W limit.
    """
    enc = logical_encoding(params.p)
    denom = _channel_denominator(params)
    plus = np.kron([enc.a, enc.b], [enc.a, enc.b])
    minus = np.kron([enc.a, -enc.b], [enc.a, -enc.b])
    even_part = plus + minus
    odd_part = plus - minus
    # N^2 (plus plus' + minus minus' + q c (plus minus' + minus plus')) regrouped.
    w_even = one_plus(params.p, params.n - 2, params.cos_m) / (4.0 * denom)
    w_odd = one_plus(params.p, params.n - 2, -params.cos_m) / (4.0 * denom)
    rho = w_even * np.outer(even_part, even_part) + w_odd * np.outer(odd_part, odd_part)
    return rho.astype(complex)


def printed_pair_state(params: ChannelParams) -> np.ndarray:
    """Return the printed even/odd expansion of rho_12 (not trace one in general)."""
    enc = logical_encoding(params.p)
    n_sq = normalization_factor(params) ** 2
    q = power(params.p, params.n - 2) * params.cos_m
    a2, b2 = enc.a ** 2, enc.b ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = (a2 * a2 + b2 * b2) * (1 + q)
    rho[1:3, 1:3] = a2 * b2 * (1 - q)
    rho[0, 3] = rho[3, 0] = a2 * b2 * (1 + q)
    return 2.0 * n_sq * rho


def reduced_single_state(params: ChannelParams, mode: str = "trace") -> np.ndarray:
    """Return the single-mode reduction rho_1.

    ``mode="trace"`` takes the partial trace of :func:`reduced_pair_state`;
    ``mode="paper"`` returns the printed identity-proportional form, kept for
    the compare ledger only.
    """
    if mode == "paper":
        return printed_single_coefficient(params) * np.eye(2, dtype=complex)
    if mode != "trace":
        raise OutOfRange(f"unknown rho1 mode {mode!r}")
    rho = reduced_pair_state(params).reshape(2, 2, 2, 2)
    return np.trace(rho, axis1=1, axis2=3)


def printed_single_coefficient(params: ChannelParams) -> float:
    """Return ``Lambda / (4 (1 + p^n cos m pi))``, the printed rho_1 coefficient."""
    return lambda_factor(params) / (4.0 * _channel_denominator(params))


def classify_limit(params: ChannelParams, tol: float = 1e-6) -> str:
    """Return the limiting regime of ``params`` at tolerance ``tol``."""
    if tol <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tol}")
    if params.p <= tol:
        tag = LimitTag.GHZ
    elif params.p >= 1.0 - tol:
        tag = LimitTag.GROUND if params.m % 2 == 0 else LimitTag.W
    else:
        tag = LimitTag.GENERIC
    logging.debug("channel %s classified as %s", params, tag)
    return tag


__all__ = [
    "ChannelParams",
    "LogicalEncoding",
    "SplitCoefficients",
    "LimitTag",
    "power",
    "one_plus",
    "normalization_factor",
    "multipartite_state_norm",
    "logical_encoding",
    "split_coefficients",
    "lambda_factor",
    "reduced_pair_state",
    "printed_pair_state",
    "reduced_single_state",
    "printed_single_coefficient",
    "classify_limit",
]
