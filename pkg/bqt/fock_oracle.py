"""Truncated Fock-space arithmetic for coherent and cat states.

An independent route to the overlaps and logical encoding used by
:mod:`bqt.coherent_core`; nothing here relies on the closed forms it checks,
except :func:`validate_encoding`, which compares against them on purpose.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np
from scipy.stats import poisson

from .coherent_core import logical_encoding
from .config import AGREE_TOL
from .errors import BQTError, CutoffMismatch, CutoffTooSmall, DegenerateState, OutOfRange, describe


@dataclass(frozen=True)
class FockVector:
    """Amplitudes on photon numbers ``0..cutoff`` plus their truncation tail."""

    amplitudes: np.ndarray
    cutoff: int
    tail_bound: float = 0.0

    @property
    def norm_deviation(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)


def required_cutoff(eta: complex) -> int:
    """Return the smallest cutoff the ``mean + 10 sigma`` rule accepts for ``eta``."""
    mean = abs(eta) ** 2
    if mean == 0.0:
        return 1
    return math.ceil(mean + 10.0 * math.sqrt(mean + 1.0))


def auto_cutoff(eta: complex) -> int:
    cutoff = required_cutoff(eta)
    logging.debug("auto cutoff for eta=%s: %d", eta, cutoff)
    return cutoff


def coherent_fock(eta: complex, cutoff: int) -> FockVector:
    """Return ``|eta>`` truncated to photon numbers ``0..cutoff``."""
    if cutoff < 1:
        raise CutoffTooSmall(f"cutoff must be >= 1, got {cutoff}")
    needed = required_cutoff(eta)
    if cutoff < needed:
        raise CutoffTooSmall(
            f"cutoff {cutoff} too small for |eta|={abs(eta):.6g}; need at least {needed}"
        )
    amps = np.empty(cutoff + 1, dtype=complex)
    amps[0] = math.exp(-abs(eta) ** 2 / 2.0)
    for k in range(cutoff):
        amps[k + 1] = amps[k] * eta / math.sqrt(k + 1)
    tail = float(poisson.sf(cutoff, abs(eta) ** 2))
    return FockVector(amplitudes=amps, cutoff=cutoff, tail_bound=tail)


def overlap(u: FockVector, v: FockVector) -> complex:
    """Return ``<u|v>``."""
    if u.cutoff != v.cutoff:
        raise CutoffMismatch(f"cutoffs differ: {u.cutoff} != {v.cutoff}")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def even_odd_fock(eta: complex, cutoff: int) -> Tuple[FockVector, FockVector]:
    """Return the normalised even and odd cat states built on ``eta``."""
    if eta == 0:
        raise DegenerateState("odd cat state has zero norm at eta = 0")
    plus = coherent_fock(eta, cutoff)
    minus = coherent_fock(-eta, cutoff)
    p = math.exp(-2.0 * abs(eta) ** 2)
    n_even = 1.0 / math.sqrt(2.0 * (1.0 + p))
    n_odd = 1.0 / math.sqrt(2.0 * (1.0 - p))
    tail = plus.tail_bound
    even = FockVector(n_even * (plus.amplitudes + minus.amplitudes), cutoff, tail)
    odd = FockVector(n_odd * (plus.amplitudes - minus.amplitudes), cutoff, tail)
    return even, odd


def validate_encoding(eta: complex, cutoff: int) -> Dict[str, float]:
    """Compare ``<eta_e|eta>`` and ``<eta_o|eta>`` with the closed-form ``a`` and ``b``."""
    even, odd = even_odd_fock(eta, cutoff)
    state = coherent_fock(eta, cutoff)
    p = math.exp(-2.0 * abs(eta) ** 2)
    enc = logical_encoding(p)
    dev_a = abs(overlap(even, state) - enc.a)
    dev_b = abs(overlap(odd, state) - enc.b)
    return {
        "eta": float(abs(eta)),
        "a": enc.a,
        "b": enc.b,
        "deviation_a": dev_a,
        "deviation_b": dev_b,
        "max_deviation": max(dev_a, dev_b),
    }


def multipartite_gram(eta: complex, n: int, cutoff: int) -> np.ndarray:
    """Return the Gram matrix of ``|eta>^n`` and ``|-eta>^n``.

    The product structure means the n-mode inner products are n-th powers of
    the single-mode ones, so no n-mode tensor is ever built.
    """
    if n < 2:
        raise OutOfRange(f"n must be >= 2, got {n}")
    plus = coherent_fock(eta, cutoff)
    minus = coherent_fock(-eta, cutoff)
    vectors = (plus, minus)
    gram = np.empty((2, 2), dtype=complex)
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            gram[i, j] = overlap(u, v) ** n
    return gram


def validation_table(etas: Iterable[float], cutoff: int | None = None) -> List[Dict[str, object]]:
    """Run every Fock-level check for each ``eta``; errors are captured per row."""
    rows: List[Dict[str, object]] = []
    for eta in etas:
        row: Dict[str, object] = {"eta": float(eta)}
        size = auto_cutoff(eta) if cutoff is None else cutoff
        row["cutoff"] = size
        try:
            state = coherent_fock(eta, size)
            mirrored = coherent_fock(-eta, size)
            row["norm_deviation"] = state.norm_deviation
            row["tail_bound"] = state.tail_bound
            row["overlap_deviation"] = abs(
                overlap(state, mirrored) - math.exp(-2.0 * abs(eta) ** 2)
            )
            gram = multipartite_gram(eta, 3, size)
            row["gram_deviation"] = abs(gram[0, 1] - math.exp(-6.0 * abs(eta) ** 2))
            even, odd = even_odd_fock(eta, size)
            row["even_norm_deviation"] = even.norm_deviation
            row["odd_norm_deviation"] = odd.norm_deviation
            row["orthogonality"] = abs(overlap(even, odd))
            row["encoding_deviation"] = validate_encoding(eta, size)["max_deviation"]
            row["error"] = ""
        except BQTError as exc:
            logging.info("validation at eta=%s stopped: %s", eta, exc)
            row["error"] = describe(exc)
        rows.append(row)
    return rows


def max_deviation(rows: Iterable[Dict[str, object]]) -> float:
    """Return the largest numeric deviation recorded in ``rows``."""
    keys = (
        "norm_deviation",
        "overlap_deviation",
        "gram_deviation",
        "even_norm_deviation",
        "odd_norm_deviation",
        "orthogonality",
        "encoding_deviation",
    )
    worst = 0.0
    for row in rows:
        for key in keys:
            value = row.get(key)
            if isinstance(value, float):
                worst = max(worst, value)
    return worst


def within_tolerance(rows: Iterable[Dict[str, object]], tol: float = AGREE_TOL) -> bool:
    return max_deviation(rows) < tol


__all__ = [
    "FockVector",
    "required_cutoff",
    "auto_cutoff",
    "coherent_fock",
    "overlap",
    "even_odd_fock",
    "validate_encoding",
    "multipartite_gram",
    "validation_table",
    "max_deviation",
    "within_tolerance",
]
