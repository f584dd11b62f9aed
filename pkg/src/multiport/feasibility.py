"""Which single-photon output states and distributions can be produced.

A state ``c`` is reachable from port 0 iff its cyclic autocorrelation
vanishes at every nonzero lag::

    r_p = sum_m c[m] * conj(c[(m - p) % d]) = 0,   p = 1..d-1

Only the moduli ``|c_m|`` matter for the output distribution, and closing the
polygon formed by the terms of ``r_p`` requires every side to be no longer
than the sum of the others. Those polygon inequalities are necessary for any
``d``; for ``d = 3`` they are also sufficient (see :mod:`multiport.synthesis`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import FEASIBILITY_TOL, check_dimension, probability_distribution

POLYGON_TOL = 1e-12
ZERO_TOL = 1e-12
"""Magnitudes below this are treated as exactly zero."""


class Verdict(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NECESSARY_PASSED = "necessary-passed"


class TwoModeVerdict(str, enum.Enum):
    POSSIBLE = "possible"
    IMPOSSIBLE = "impossible"


@dataclass(frozen=True)
class FeasibilityReport:
    """Verdict together with the numbers it was derived from.

    ``polygon_margins`` holds ``(m, p, rhs - lhs)`` triples; a negative margin
    is a violated inequality. ``details`` carries operation-specific extras
    such as synthesized phases.
    """

    verdict: Verdict
    exact_residuals: tuple[complex, ...] = ()
    polygon_margins: tuple[tuple[int, int, float], ...] = ()
    notes: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.INFEASIBLE

    @property
    def min_margin(self) -> float:
        return min((m for _, _, m in self.polygon_margins), default=float("inf"))

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.exact_residuals), default=0.0)


def exact_condition_residuals(c: ArrayLike) -> NDArray[np.complex128]:
    """Cyclic autocorrelation ``r_p`` of ``c`` for lags ``p = 1..d-1``."""
    c = np.asarray(c, dtype=np.complex128)
    d = check_dimension(c.size)
    return np.array([np.sum(c * np.roll(c, p).conj()) for p in range(1, d)])


def exact_condition_k_form(c: ArrayLike) -> NDArray[np.complex128]:
    """Per-port residuals ``sum_{m != n} c_m conj(c_n) exp(2j*pi*k*(n - m)/d)``.

    Entry ``k`` equals ``|lam_k|^2 - 1`` for the phases recovered from ``c``;
    evaluated here as the explicit double sum.
    """
    c = np.asarray(c, dtype=np.complex128)
    d = check_dimension(c.size)
    idx = np.arange(d)
    diff = (idx[None, :] - idx[:, None]) % d  # n - m
    prod = np.outer(c, c.conj())
    np.fill_diagonal(prod, 0.0)
    k = idx[:, None, None]
    return np.sum(prod[None] * np.exp(2j * np.pi * k * diff[None] / d), axis=(1, 2))


def _cyclic_products(a: NDArray[np.float64]) -> NDArray[np.float64]:
    # row p-1 holds a[m] * a[(m - p) % d] for m = 0..d-1
    d = a.size
    return np.array([a * np.roll(a, p) for p in range(1, d)])


def _margins(lengths: NDArray[np.float64]) -> list[tuple[int, int, float]]:
    out = []
    for row, side in enumerate(lengths):
        total = side.sum()
        for m, s in enumerate(side):
            out.append((m, row + 1, float((total - s) - s)))
    return out


def polygon_margins(magnitudes: ArrayLike) -> list[tuple[int, int, float]]:
    """``(m, p, margin)`` for every polygon inequality, all ``m`` and ``p >= 1``."""
    a = np.asarray(magnitudes, dtype=float)
    check_dimension(a.size)
    a = np.where(a < ZERO_TOL, 0.0, a)
    return _margins(_cyclic_products(a))


def _inequality_report(margins, tol: float, what: str) -> FeasibilityReport:
    bad = [(m, p, g) for m, p, g in margins if g < -tol]
    if bad:
        m, p, g = min(bad, key=lambda t: t[2])
        notes = (
            f"{len(bad)} {what} inequalities violated; worst at m={m}, p={p} "
            f"(side exceeds the sum of the others by {-g:.6g})",
        )
        return FeasibilityReport(Verdict.INFEASIBLE, polygon_margins=tuple(margins), notes=notes)
    return FeasibilityReport(
        Verdict.NECESSARY_PASSED,
        polygon_margins=tuple(margins),
        notes=(f"all {what} inequalities hold (necessary conditions only)",),
    )


def polygon_inequalities(p_dist: ArrayLike, tol: float = POLYGON_TOL) -> FeasibilityReport:
    """Necessary polygon conditions on an output distribution.

    Side lengths are ``sqrt(P_m) * sqrt(P_{m-p})``. The verdict is at best
    ``necessary-passed``; only the ``d = 3`` synthesis can upgrade it.
    """
    p = probability_distribution(p_dist)
    return _inequality_report(polygon_margins(np.sqrt(p)), tol, "polygon")


def concurrence_matrix(c: ArrayLike) -> NDArray[np.float64]:
    """Pairwise mode concurrences ``2 |c_m| |c_n|`` of a single-photon state."""
    a = np.abs(np.asarray(c, dtype=np.complex128))
    check_dimension(a.size)
    cm = 2.0 * np.outer(a, a)
    np.fill_diagonal(cm, 0.0)
    return cm


def check_concurrence_matrix(cm: ArrayLike, tol: float = 1e-12) -> NDArray[np.float64]:
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError(f"concurrence matrix must be square, got shape {cm.shape}")
    check_dimension(cm.shape[0])
    if not np.allclose(cm, cm.T, atol=tol, rtol=0):
        raise ValueError("concurrence matrix must be symmetric")
    if np.any(np.abs(np.diag(cm)) > tol):
        raise ValueError("concurrence matrix must have a zero diagonal")
    if np.any(cm < -tol) or np.any(cm > 1 + tol):
        raise ValueError("concurrences must lie in [0, 1]")
    return cm


def concurrence_inequalities(cm: ArrayLike, tol: float = POLYGON_TOL) -> FeasibilityReport:
    """Polygon conditions restated on pairwise concurrences.

    The inequalities are homogeneous, so the violation threshold is taken
    relative to the largest concurrence.
    """
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError(f"concurrence matrix must be square, got shape {cm.shape}")
    d = check_dimension(cm.shape[0])
    idx = np.arange(d)
    lengths = np.array([cm[idx, (idx - p) % d] for p in range(1, d)])
    scale = float(cm.max()) if cm.size else 0.0
    return _inequality_report(_margins(lengths), tol * max(scale, 0.0), "concurrence")


def two_mode_only_verdict(d: int, a: int, b: int) -> TwoModeVerdict:
    """Can some phase setting entangle exactly modes ``a`` and ``b``?

    Only when the modes sit half a cycle apart, which needs ``d`` even.
    """
    d = check_dimension(d)
    if not (0 <= a < d and 0 <= b < d) or a == b:
        raise IndexError(f"need two distinct modes in 0..{d - 1}, got {a}, {b}")
    if d % 2 == 0 and (b - a) % d == d // 2:
        return TwoModeVerdict.POSSIBLE
    return TwoModeVerdict.IMPOSSIBLE


def four_port_margin(p_dist: ArrayLike) -> float:
    """Slack of the exact reachability condition for ``d = 4``.

    A four-outcome distribution is reachable iff
    ``((P0 - P2) / (P0 + P2))**2 + ((P1 - P3) / (P1 + P3))**2 <= 1``; this
    returns ``1`` minus the left side (an empty pair contributes 0).
    """
    p = np.asarray(p_dist, dtype=float)
    if p.shape != (4,):
        raise ValueError("four-port condition needs 4 probabilities")
    total = 0.0
    for a, b in ((p[0], p[2]), (p[1], p[3])):
        if a + b > 0:
            total += ((a - b) / (a + b)) ** 2
    return 1.0 - total


def check_state(c: ArrayLike, tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    """Exact verdict for a full amplitude vector (phases included)."""
    c = np.asarray(c, dtype=np.complex128)
    res = exact_condition_residuals(c)
    margins = polygon_margins(np.abs(c))
    worst = float(np.max(np.abs(res)))
    if worst <= tol:
        verdict, note = Verdict.FEASIBLE, "autocorrelation vanishes at every nonzero lag"
    else:
        p = int(np.argmax(np.abs(res))) + 1
        verdict, note = Verdict.INFEASIBLE, f"autocorrelation at lag {p} is {worst:.6g} > {tol:g}"
    return FeasibilityReport(verdict, tuple(complex(r) for r in res), tuple(margins), (note,))
