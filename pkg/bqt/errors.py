"""Exceptions raised by the BQT workbench.

Every error derives from :class:`BQTError`, itself a :class:`ValueError`, so
callers that only care about bad input can keep catching ``ValueError``.
"""

from __future__ import annotations


class BQTError(ValueError):
    """Base class for workbench errors."""


class DegenerateChannel(BQTError):
    """The channel normalisation denominator 1 + p^n cos(m pi) vanishes."""


class OutOfRange(BQTError):
    """A parameter lies outside its declared interval."""


class OutOfDomain(BQTError):
    """A printed formula is undefined at the requested point."""


class CutoffTooSmall(BQTError):
    """The Fock cutoff cannot hold the requested coherent amplitude."""


class CutoffMismatch(BQTError):
    """Two Fock vectors with different cutoffs were combined."""


class DegenerateState(BQTError):
    """A state has zero norm and cannot be normalised."""


class MalformedState(BQTError):
    """A matrix violates the density-matrix invariants."""


class DegenerateSpectrum(BQTError):
    """Eigenvector differentiation is ill-posed at a near-degeneracy."""


class InconsistentFamily(BQTError):
    """A pure-state family changes purity."""


class InvalidBloch(BQTError):
    """A Bloch vector lies outside the unit ball."""


class MalformedGate(BQTError):
    """A gate has the wrong arity or an unknown kind."""


class ResourceLimit(BQTError):
    """A simulation exceeds the supported register size."""


def describe(exc: Exception) -> str:
    """Return ``"<ErrorName>: message"`` for table cells and reports."""
    return f"{type(exc).__name__}: {exc}"


__all__ = [
    "BQTError",
    "DegenerateChannel",
    "OutOfRange",
    "OutOfDomain",
    "CutoffTooSmall",
    "CutoffMismatch",
    "DegenerateState",
    "MalformedState",
    "DegenerateSpectrum",
    "InconsistentFamily",
    "InvalidBloch",
    "MalformedGate",
    "ResourceLimit",
    "describe",
]
