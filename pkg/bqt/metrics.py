"""Model-independent quantum-information metrics.

Partial trace, Wootters concurrence, Uhlmann fidelity, quantum Fisher
information (spectral and Bloch forms) and the alpha family of statistical
speeds.  Matrix square roots go through a Hermitian factor A with
rho = A A^dagger, eigenvalues below RANK_TOL dropped, and singular values
of products of factors replace sqrt(sqrt(rho) sigma sqrt(rho)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .coherent_core import ChannelParams, normalization_factor, one_plus
from .config import (
    BLOCH_TOL,
    CLAMP_TOL,
    DENSITY_STEP,
    EIGEN_DROP,
    GAP_TOL,
    MALFORMED_TOL,
    PURE_TOL,
    RANK_TOL,
)
from .errors import (
    DegenerateSpectrum,
    InconsistentFamily,
    InvalidBloch,
    MalformedState,
    OutOfRange,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)


@dataclass(frozen=True)
class ParamFamily:
    """A density-matrix valued function of one real parameter."""

    evaluator: Callable[[float], np.ndarray]
    step: float = DENSITY_STEP
    richardson: bool = False

    def __call__(self, xi: float) -> np.ndarray:
        return np.asarray(self.evaluator(xi), dtype=complex)


def check_density(rho: np.ndarray, tol: float = MALFORMED_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`MalformedState`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise MalformedState(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise MalformedState("density matrix is not Hermitian")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > tol:
        raise MalformedState(f"density matrix trace is {trace!r}, expected 1")
    low = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if low < -tol:
        raise MalformedState(f"density matrix has negative eigenvalue {low:.3e}")
    return rho


def _psd_eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    herm = (matrix + matrix.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    if w.min() < -CLAMP_TOL:
        raise MalformedState(f"eigenvalue {w.min():.3e} below clamping tolerance")
    return np.clip(w, 0.0, None), v


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Return the principal square root of a positive semidefinite ``matrix``."""
    w, v = _psd_eigh(matrix)
    return (v * np.sqrt(w)) @ v.conj().T


def _factor(matrix: np.ndarray) -> np.ndarray:
    """Return ``A`` with ``A A^dagger == matrix`` from the eigen-decomposition."""
    w, v = _psd_eigh(matrix)
    return v * np.sqrt(np.where(w > RANK_TOL, w, 0.0))


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Return ``r`` with ``rho = (I + r . sigma) / 2``."""
    rho = np.asarray(rho, dtype=complex)
    return np.array(
        [2.0 * rho[0, 1].real, -2.0 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    )


def density_from_bloch(r: Sequence[float]) -> np.ndarray:
    x, y, z = (float(c) for c in r)
    return (IDENTITY2 + x * PAULI_X + y * PAULI_Y + z * PAULI_Z) / 2


def partial_trace(rho: np.ndarray, keep: str = "first") -> np.ndarray:
    """Return the single-qubit reduction of a two-qubit ``rho``."""
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise MalformedState(f"pair density must be 4x4, got {rho.shape}")
    tensor = rho.reshape(2, 2, 2, 2)
    if keep == "first":
        return np.einsum("ijkj->ik", tensor)
    if keep == "second":
        return np.einsum("jijk->ik", tensor)
    raise OutOfRange(f"keep must be 'first' or 'second', got {keep!r}")


def concurrence(rho: np.ndarray) -> float:
    """Return the Wootters concurrence of a two-qubit ``rho``."""
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise MalformedState(f"pair density must be 4x4, got {rho.shape}")
    # For any A A^dagger = rho the singular values of A^dagger (Y x Y) A* are
    # the square roots of eig(rho rho~).
    a = _factor(rho)
    s = np.linalg.svd(a.conj().T @ SPIN_FLIP @ a.conj(), compute_uv=False)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def concurrence_closed_form(params: ChannelParams) -> float:
    """Return ``max(0, C+, C-)`` for the channel's two-mode reduction."""
    denom = 1.0 / (2.0 * normalization_factor(params) ** 2)
    p = params.p
    k = (1.0 - p) * (1.0 + p) / (2.0 * denom)
    q_plus = one_plus(p, params.n - 2, params.cos_m)
    q_minus = one_plus(p, params.n - 2, -params.cos_m)
    c_plus = k * (abs(q_plus) - q_minus)
    c_minus = k * (abs(q_minus) - q_plus)
    return float(max(0.0, c_plus, c_minus))


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Return ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    rho = check_density(rho)
    sigma = check_density(sigma)
    if rho.shape != sigma.shape:
        raise MalformedState(f"shape mismatch {rho.shape} vs {sigma.shape}")
    # Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of A^dagger B.
    s = np.linalg.svd(_factor(rho).conj().T @ _factor(sigma), compute_uv=False)
    return float(np.sum(s) ** 2)


def qfi_bloch(r: Sequence[float], dr: Sequence[float]) -> float:
    """Return the single-qubit QFI from the Bloch vector ``r`` and its derivative ``dr``."""
    r = np.asarray(r, dtype=float)
    dr = np.asarray(dr, dtype=float)
    radius = float(np.linalg.norm(r))
    if radius > 1.0 + BLOCH_TOL:
        raise InvalidBloch(f"|r| = {radius:.12g} lies outside the Bloch ball")
    speed = float(dr @ dr)
    radial = float(r @ dr)
    if radius < 1.0 - PURE_TOL:
        return speed + radial * radial / (1.0 - radius * radius)
    if abs(radial) > 1e-6:
        raise InconsistentFamily(f"pure family changes purity: r.dr = {radial:.3e}")
    if abs(radial) > PURE_TOL:
        logging.debug("r.dr = %.3e on the sphere surface treated as zero", radial)
    return speed


def _central(fn: Callable[[float], np.ndarray], xi0: float, h: float, richardson: bool):
    def diff(step: float) -> np.ndarray:
        return (fn(xi0 + step) - fn(xi0 - step)) / (2.0 * step)

    if richardson:
        return (4.0 * diff(h / 2.0) - diff(h)) / 3.0
    return diff(h)


def density_derivative(family: ParamFamily, xi0: float) -> np.ndarray:
    """Return ``d rho / d xi`` at ``xi0`` by central differences."""
    return _central(family, xi0, family.step, family.richardson)


def _aligned_eigh(rho: np.ndarray, reference: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    for k in range(v.shape[1]):
        ov = np.vdot(reference[:, k], v[:, k])
        if abs(ov) > 0:
            v[:, k] *= np.conj(ov) / abs(ov)
    return w, v


def qfi_spectral(family: ParamFamily, xi0: float) -> float:
    """Return the QFI of ``family`` at ``xi0`` from its spectral decomposition.

    Parameters
    ----------
    family:
        Differentiable density-matrix family with its finite-difference step.
    xi0:
        Evaluation point; the family is sampled on ``[xi0 - h, xi0 + h]``.

    Returns
    -------
    float
        Classical Fisher term over the eigenvalues plus the weighted
        pure-state terms minus the eigenvector overlap correction.
    """
    rho0 = family(xi0)
    lam, vec = np.linalg.eigh((rho0 + rho0.conj().T) / 2)
    live = [k for k in range(len(lam)) if lam[k] > EIGEN_DROP]
    for i in range(len(lam) - 1):
        if (i in live or i + 1 in live) and lam[i + 1] - lam[i] < GAP_TOL:
            raise DegenerateSpectrum(
                f"eigenvalue gap {lam[i + 1] - lam[i]:.3e} at xi={xi0}; perturb xi or reduce h"
            )

    def eigvals(xi: float) -> np.ndarray:
        return _aligned_eigh(family(xi), vec)[0]

    def eigvecs(xi: float) -> np.ndarray:
        return _aligned_eigh(family(xi), vec)[1]

    dlam = _central(eigvals, xi0, family.step, family.richardson)
    dvec = _central(eigvecs, xi0, family.step, family.richardson)

    classical = sum(dlam[k] ** 2 / lam[k] for k in live)
    weighted = 0.0
    for k in live:
        psi, dpsi = vec[:, k], dvec[:, k]
        pure_k = 4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2)
        weighted += lam[k] * pure_k
    correction = 0.0
    for k in live:
        for l in live:
            if k == l:
                continue
            amp = abs(np.vdot(vec[:, k], dvec[:, l])) ** 2
            correction += 8.0 * lam[k] * lam[l] / (lam[k] + lam[l]) * amp
    return float(classical + weighted - correction)


def classical_speed_alpha(pprime: Sequence[float], alpha: float) -> float:
    """Return ``((1/2) sum |p'_x|^alpha)^(1/alpha)``."""
    if alpha < 1:
        raise OutOfRange(f"alpha must be >= 1, got {alpha}")
    pprime = np.asarray(pprime, dtype=float)
    if abs(pprime.sum()) > 1e-9:
        raise OutOfRange(f"derivative of a probability vector must sum to 0, got {pprime.sum():.3e}")
    return float((0.5 * np.sum(np.abs(pprime) ** alpha)) ** (1.0 / alpha))


def quantum_speed_alpha(drho: np.ndarray, alpha: float) -> float:
    """Return ``((1/2) Tr |d rho|^alpha)^(1/alpha)`` from the singular values of ``drho``."""
    if alpha < 1:
        raise OutOfRange(f"alpha must be >= 1, got {alpha}")
    drho = np.asarray(drho, dtype=complex)
    if np.max(np.abs(drho - drho.conj().T)) > MALFORMED_TOL:
        raise MalformedState("derivative of a density matrix must be Hermitian")
    if abs(np.trace(drho)) > MALFORMED_TOL:
        raise MalformedState("derivative of a density matrix must be traceless")
    s = np.linalg.svd(drho, compute_uv=False)
    return float((0.5 * np.sum(s ** alpha)) ** (1.0 / alpha))


def hss(drho: np.ndarray) -> float:
    """Return the Hilbert-Schmidt speed ``sqrt((1/2) Tr[(d rho)^2])``."""
    return quantum_speed_alpha(drho, 2.0)


def local_extrema(values: Sequence[float], kind: str = "max", edges: bool = False) -> List[int]:
    """Return the indices where ``values`` has a local maximum or minimum.

    Interior points only, unless ``edges`` is set; an end point then counts
    when it strictly beats its single neighbour.
    """
    v = np.asarray(values, dtype=float)
    if kind == "min":
        v = -v
    found = []
    if edges and len(v) > 1 and np.isfinite(v[0]) and np.isfinite(v[1]) and v[0] > v[1]:
        found.append(0)
    for i in range(1, len(v) - 1):
        if not (np.isfinite(v[i - 1]) and np.isfinite(v[i]) and np.isfinite(v[i + 1])):
            continue
        if v[i] >= v[i - 1] and v[i] >= v[i + 1] and (v[i] > v[i - 1] or v[i] > v[i + 1]):
            found.append(i)
    last = len(v) - 1
    if edges and last > 0 and np.isfinite(v[last]) and np.isfinite(v[last - 1]) and v[last] > v[last - 1]:
        found.append(last)
    return found


def _nearest(reference: List[int], other: List[int]) -> float:
    if not reference:
        return 0.0
    if not other:
        return math.inf
    return float(max(min(abs(i - j) for j in other) for i in reference))


def extremum_offsets(
    reference: Sequence[float], other: Sequence[float], edges: bool = True
) -> Dict[str, float]:
    """Return how far the extrema of ``reference`` sit from those of ``other``.

    For every local maximum (minimum) of ``reference`` the distance in grid
    steps to the nearest local maximum (minimum) of ``other`` is taken, and
    the worst one reported; ``inf`` when ``other`` has none of that kind.
    """
    return {
        "maxima": _nearest(local_extrema(reference, "max", edges), local_extrema(other, "max", edges)),
        "minima": _nearest(local_extrema(reference, "min", edges), local_extrema(other, "min", edges)),
    }


def trend_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Return the Pearson correlation of the finite pairs in ``x`` and ``y``."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    mask = np.isfinite(xa) & np.isfinite(ya)
    if mask.sum() < 2 or np.std(xa[mask]) == 0 or np.std(ya[mask]) == 0:
        return math.nan
    return float(np.corrcoef(xa[mask], ya[mask])[0, 1])


__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "IDENTITY2",
    "ParamFamily",
    "check_density",
    "psd_sqrt",
    "bloch_vector",
    "density_from_bloch",
    "partial_trace",
    "concurrence",
    "concurrence_closed_form",
    "uhlmann_fidelity",
    "qfi_bloch",
    "density_derivative",
    "qfi_spectral",
    "classical_speed_alpha",
    "quantum_speed_alpha",
    "hss",
    "local_extrema",
    "extremum_offsets",
    "trend_correlation",
]
