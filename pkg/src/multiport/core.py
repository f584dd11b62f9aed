"""Linear algebra of the two-multiport interferometer.

A symmetric ``d``-port multiport acts on single-photon amplitudes as the
discrete Fourier transform ``F[m, n] = exp(2j*pi*m*n/d) / sqrt(d)`` (note the
``+`` sign). Placing phase shifters ``lam`` between two such multiports gives
the interferometer ``U = F @ diag(lam) @ F``.

All functions are pure and return fresh numpy arrays.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

UNIT_TOL = 1e-12
"""Tolerance on ``| |lam_k| - 1 |`` accepted by :func:`phase_vector`."""

FEASIBILITY_TOL = 1e-9
"""Default tolerance for deciding whether a recovered phase has unit modulus."""

UNITARY_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when the number of ports is below two."""


class PhaseError(ValueError):
    """Raised for phase vectors that are not unit modulus."""


class PortError(IndexError):
    """Raised for an input port outside ``0..d-1``."""


def check_dimension(d: int) -> int:
    if isinstance(d, bool) or int(d) != d:
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")
    return d


def phase_vector(lam: ArrayLike, tol: float = UNIT_TOL) -> NDArray[np.complex128]:
    """Validate a vector of unit-modulus phase factors.

    Entries within ``tol`` of the unit circle are projected onto it; anything
    further off raises :class:`PhaseError`.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    if lam.ndim != 1:
        raise PhaseError(f"phase vector must be one-dimensional, got shape {lam.shape}")
    check_dimension(lam.size)
    if not np.all(np.isfinite(lam)):
        raise PhaseError("phase vector contains non-finite entries")
    mod = np.abs(lam)
    dev = np.max(np.abs(mod - 1.0))
    if dev > tol:
        raise PhaseError(f"phase factors must have unit modulus (max deviation {dev:.3e})")
    return lam / mod


def phases_from_angles(theta: ArrayLike) -> NDArray[np.complex128]:
    """``exp(1j * theta)`` for a vector of angles in radians."""
    theta = np.asarray(theta, dtype=float)
    return phase_vector(np.exp(1j * theta))


def amplitude_vector(c: ArrayLike, tol: float = UNIT_TOL) -> NDArray[np.complex128]:
    """Validate a normalized single-photon amplitude vector."""
    c = np.asarray(c, dtype=np.complex128)
    if c.ndim != 1:
        raise ValueError(f"amplitude vector must be one-dimensional, got shape {c.shape}")
    check_dimension(c.size)
    norm2 = float(np.vdot(c, c).real)
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"amplitude vector is not normalized (|c|^2 = {norm2:.15g})")
    return c


def probability_distribution(p: ArrayLike, tol: float = 1e-10) -> NDArray[np.float64]:
    """Validate a probability vector over ``d >= 2`` outcomes."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"distribution must be one-dimensional, got shape {p.shape}")
    check_dimension(p.size)
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("probabilities must be finite and non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total:.15g}, not 1")
    return p


def is_unitary(m: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0])) <= tol)


def dft_matrix(d: int) -> NDArray[np.complex128]:
    """Symmetric multiport matrix ``exp(2j*pi*m*n/d) / sqrt(d)``.

    The exponent ``m*n`` is reduced mod ``d`` before exponentiation so the
    entries are exact roots of unity up to a single rounding.
    """
    d = check_dimension(d)
    idx = np.arange(d)
    k = np.outer(idx, idx) % d
    return np.exp(2j * np.pi * k / d) / np.sqrt(d)


def phase_diagonal(lam: ArrayLike) -> NDArray[np.complex128]:
    return np.diag(phase_vector(lam))


def interferometer(lam: ArrayLike) -> NDArray[np.complex128]:
    """Single-photon unitary ``F @ diag(lam) @ F``."""
    lam = phase_vector(lam)
    f = dft_matrix(lam.size)
    return (f * lam) @ f


def output_amplitudes(lam: ArrayLike, input_port: int = 0) -> NDArray[np.complex128]:
    """Output amplitudes for one photon entering ``input_port``.

    This is column ``input_port`` of :func:`interferometer`. For port 0 it
    reduces to ``F @ lam / sqrt(d)``.
    """
    lam = phase_vector(lam)
    d = lam.size
    if isinstance(input_port, bool) or int(input_port) != input_port or not 0 <= input_port < d:
        raise PortError(f"input port {input_port!r} out of range for d={d}")
    return interferometer(lam)[:, int(input_port)]


class PhaseRecovery(NamedTuple):
    """Outcome of inverting ``c = F @ lam / sqrt(d)`` for the phases."""

    feasible: bool
    lam: NDArray[np.complex128]
    """Recovered ``sqrt(d) * F^H @ c``; unit modulus only when ``feasible``."""
    deviations: NDArray[np.float64]
    """``| |lam_k| - 1 |`` per port."""


def phases_for_state(c: ArrayLike, tol: float = FEASIBILITY_TOL) -> PhaseRecovery:
    """Phases that send a photon from port 0 into the state ``c``, if any.

    The state is producible iff every entry of ``sqrt(d) * F^H @ c`` lies on
    the unit circle.
    """
    c = np.asarray(c, dtype=np.complex128)
    check_dimension(c.size)
    d = c.size
    lam = np.sqrt(d) * (dft_matrix(d).conj().T @ c)
    dev = np.abs(np.abs(lam) - 1.0)
    return PhaseRecovery(bool(np.all(dev <= tol)), lam, dev)


def random_phases(d: int, rng: np.random.Generator | None = None) -> NDArray[np.complex128]:
    rng = np.random.default_rng() if rng is None else rng
    return np.exp(2j * np.pi * rng.random(check_dimension(d)))


def format_phases(lam: Sequence[complex]) -> list[float]:
    """Phase angles in ``(-pi, pi]``."""
    return [float(x) for x in np.angle(np.asarray(lam))]
