"""Phase settings that realize a target output distribution.

For three ports the triangle inequalities decide feasibility exactly and the
phases follow in closed form from the triangle's angles. For other ``d`` a
seeded multi-start least-squares search over the ``d - 1`` free phases is
used; failing to find a solution there is evidence, never a proof.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import least_squares

from .core import (
    FEASIBILITY_TOL,
    check_dimension,
    dft_matrix,
    output_amplitudes,
    phases_for_state,
    probability_distribution,
)
from .feasibility import ZERO_TOL, Verdict, polygon_inequalities

CLAMP_TOL = 1e-12
NOT_FOUND_TOL = 1e-6

_X = np.exp(1j * np.pi / 3)


class TriangleError(ValueError):
    """Magnitudes that cannot form the triangle needed for ``d = 3``."""


class Method(str, enum.Enum):
    CLOSED_FORM_D3 = "closed-form-d3"
    RECOVERY = "recovery-eq4"
    SEARCH = "search"


class Status(str, enum.Enum):
    SUCCESS = "success"
    INFEASIBLE = "infeasible"
    NOT_FOUND = "not-found"


@dataclass(frozen=True)
class TriangleAngles:
    a: float
    b: float
    c: float


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of a synthesis attempt.

    ``lam`` and ``achieved`` are ``None`` when nothing was constructed
    (infeasible targets). ``residual`` is the largest deviation of
    ``|achieved_m|`` from ``sqrt(target_m)``.
    """

    status: Status
    target: NDArray[np.float64]
    lam: NDArray[np.complex128] | None = None
    achieved: NDArray[np.complex128] | None = None
    residual: float = math.inf
    method: Method | None = None
    notes: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_iterations: int = 200
    seed: int = 0
    tolerance: float = FEASIBILITY_TOL
    not_found_threshold: float = NOT_FOUND_TOL
    early_stop: bool = True
    precheck: bool = True
    """Reject polygon-violating targets without searching."""

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.tolerance > 0 and self.not_found_threshold > 0):
            raise ValueError("tolerances must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def magnitude_residual(lam: ArrayLike, target: ArrayLike) -> float:
    achieved = output_amplitudes(lam, 0)
    return float(np.max(np.abs(np.abs(achieved) - np.sqrt(np.asarray(target, dtype=float)))))


def triangle_sides(magnitudes: ArrayLike) -> tuple[float, float, float]:
    """Lengths of ``c0 c2*``, ``c1 c0*`` and ``c2 c1*``."""
    m0, m1, m2 = (float(x) for x in magnitudes)
    return m0 * m2, m1 * m0, m2 * m1


def triangle_margins(magnitudes: ArrayLike) -> dict[str, float]:
    """Slack of each triangle inequality, keyed by a readable description."""
    s02, s01, s12 = triangle_sides(magnitudes)
    return {
        "|c0||c2| <= |c0||c1| + |c1||c2|": s01 + s12 - s02,
        "|c1||c0| <= |c0||c2| + |c1||c2|": s02 + s12 - s01,
        "|c1||c2| <= |c0||c2| + |c0||c1|": s02 + s01 - s12,
    }


def _clamped_arccos(x: float) -> float:
    if x > 1.0 + CLAMP_TOL or x < -1.0 - CLAMP_TOL:
        raise TriangleError(f"cosine {x!r} outside [-1, 1]; inconsistent magnitudes")
    return math.acos(min(1.0, max(-1.0, x)))


def triangle_angles(magnitudes: ArrayLike) -> TriangleAngles:
    """Interior angles of the triangle closed by the three ``c_m c*_{m-1}`` terms.

    ``a`` is opposite the ``|c1||c0|`` side, ``b`` opposite ``|c2||c1|`` and
    ``c`` opposite ``|c0||c2|``.
    """
    mags = np.asarray(magnitudes, dtype=float)
    if mags.shape != (3,):
        raise ValueError("need exactly three magnitudes")
    if np.any(mags < ZERO_TOL):
        raise TriangleError("zero magnitude: the triangle is degenerate")
    for name, slack in triangle_margins(mags).items():
        if slack < -CLAMP_TOL:
            raise TriangleError(f"triangle inequality violated: {name}")
    s02, s01, s12 = triangle_sides(mags)
    a = _clamped_arccos((s02**2 + s12**2 - s01**2) / (2 * s02 * s12))
    b = _clamped_arccos((s02**2 + s01**2 - s12**2) / (2 * s02 * s01))
    c = _clamped_arccos((s01**2 + s12**2 - s02**2) / (2 * s01 * s12))
    return TriangleAngles(a, b, c)


def closed_form_state(magnitudes: ArrayLike) -> NDArray[np.complex128]:
    """The reachable state with the given moduli and ``arg c_0 = 0``."""
    m0, m1, m2 = (float(x) for x in magnitudes)
    ang = triangle_angles((m0, m1, m2))
    return np.array(
        [
            m0,
            m1 * _X * np.exp(1j * (ang.a + 2 * ang.b) / 3),
            m2 * _X**2 * np.exp(1j * (ang.b - ang.a) / 3),
        ]
    )


def closed_form_phases(magnitudes: ArrayLike) -> NDArray[np.complex128]:
    """Phases for :func:`closed_form_state`, written out per port."""
    m0, m1, m2 = (float(x) for x in magnitudes)
    ang = triangle_angles((m0, m1, m2))
    u = np.exp(1j * (ang.a + 2 * ang.b) / 3)
    v = np.exp(1j * (ang.b - ang.a) / 3)
    return np.array(
        [
            m0 + m1 * _X * u + m2 * _X**2 * v,
            m0 + m1 * np.conj(_X) * u + m2 * np.conj(_X**2) * v,
            m0 - m1 * u + m2 * v,
        ]
    )


def equivalent_3port_states(c: ArrayLike) -> list[NDArray[np.complex128]]:
    """All reachable states sharing ``|c|`` with ``c`` (up to global phase).

    Rotating the closed triangle by a third of a turn multiplies ``c1`` by
    ``w`` and ``c2`` by ``conj(w)``; reflecting it conjugates the state.
    """
    c = np.asarray(c, dtype=np.complex128)
    w = np.exp(2j * np.pi / 3)
    out = []
    for base in (c, c.conj()):
        for j in range(3):
            out.append(base * np.array([1.0, w**j, w ** (-j)]))
    return out


def _result_from_state(target, c, method, notes=(), details=None) -> SynthesisResult:
    rec = phases_for_state(c)
    lam = rec.lam / np.abs(rec.lam)
    achieved = output_amplitudes(lam, 0)
    residual = float(np.max(np.abs(np.abs(achieved) - np.sqrt(target))))
    ok = rec.feasible and residual <= FEASIBILITY_TOL
    return SynthesisResult(
        Status.SUCCESS if ok else Status.NOT_FOUND,
        target,
        lam,
        achieved,
        residual,
        method,
        tuple(notes) + (() if ok else ("constructed phases failed verification",)),
        dict(details or {}, unit_deviation=float(rec.deviations.max())),
    )


def synthesize_3port(target: ArrayLike) -> SynthesisResult:
    """Closed-form phases for a three-outcome distribution.

    The triangle inequalities are necessary and sufficient here, so an
    ``infeasible`` status is a definitive answer.
    """
    target = probability_distribution(target)
    if target.size != 3:
        raise ValueError(f"closed form needs 3 outcomes, got {target.size}")
    mags = np.sqrt(target)
    nonzero = mags >= ZERO_TOL
    if nonzero.sum() == 1:
        k = int(np.argmax(nonzero))
        c = np.zeros(3, dtype=complex)
        c[k] = 1.0
        return _result_from_state(target, c, Method.RECOVERY, ("single output port",))
    if nonzero.sum() == 2:
        return SynthesisResult(
            Status.INFEASIBLE,
            target,
            notes=("exactly one zero magnitude: the closing condition then forces a second zero",),
        )
    margins = triangle_margins(mags)
    violated = [name for name, slack in margins.items() if slack < -CLAMP_TOL]
    if violated:
        return SynthesisResult(
            Status.INFEASIBLE,
            target,
            notes=tuple(f"triangle inequality violated: {v}" for v in violated),
            details={"triangle_margins": margins},
        )
    ang = triangle_angles(mags)
    c = closed_form_state(mags)
    return _result_from_state(
        target,
        c,
        Method.CLOSED_FORM_D3,
        details={"angles": (ang.a, ang.b, ang.c), "triangle_margins": margins},
    )


def _search_residuals(theta_free, sqrt_t, zero, f):
    lam = np.exp(1j * np.concatenate(([0.0], theta_free)))
    c = f @ lam / np.sqrt(lam.size)
    return np.concatenate((np.abs(c[~zero]) - sqrt_t[~zero], c[zero].real, c[zero].imag))


def _search_jacobian(theta_free, sqrt_t, zero, f):
    d = theta_free.size + 1
    lam = np.exp(1j * np.concatenate(([0.0], theta_free)))
    c = f @ lam / np.sqrt(d)
    # dc_m/dtheta_k = i * F[m, k] * lam_k / sqrt(d)
    dc = 1j * f[:, 1:] * lam[1:] / np.sqrt(d)
    nz = ~zero
    mod = np.abs(c[nz])
    safe = np.where(mod > 0, mod, 1.0)
    d_mod = (c[nz].conj()[:, None] * dc[nz]).real / safe[:, None]
    return np.vstack((d_mod, dc[zero].real, dc[zero].imag))


def synthesize_search(target: ArrayLike, config: SearchConfig | None = None) -> SynthesisResult:
    """Multi-start least squares over ``theta_1..theta_{d-1}`` (``theta_0 = 0``).

    Restarts draw uniform initial angles from ``default_rng(config.seed)``
    and run in order; the lowest residual wins with ties going to the
    earliest restart, so results are reproducible for a fixed seed.
    """
    config = config or SearchConfig()
    target = probability_distribution(target)
    d = target.size
    nec = polygon_inequalities(target)
    if config.precheck and nec.verdict is Verdict.INFEASIBLE:
        return SynthesisResult(
            Status.INFEASIBLE, target, method=Method.SEARCH, notes=nec.notes,
            details={"min_polygon_margin": nec.min_margin},
        )
    f = dft_matrix(d)
    sqrt_t = np.sqrt(target)
    zero = sqrt_t < ZERO_TOL
    rng = np.random.default_rng(config.seed)
    best = None
    used = 0
    for r in range(config.restarts):
        theta0 = 2 * np.pi * rng.random(d - 1)
        used = r + 1
        sol = least_squares(
            _search_residuals,
            theta0,
            jac=_search_jacobian,
            args=(sqrt_t, zero, f),
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=config.max_iterations * d,
        )
        lam = np.exp(1j * np.concatenate(([0.0], sol.x)))
        res = magnitude_residual(lam, target)
        if best is None or res < best[0]:
            best = (res, r, lam)
        if config.early_stop and best[0] <= config.tolerance:
            break
    res, idx, lam = best
    provenance = {"seed": config.seed, "restarts": config.restarts, "restarts_used": used, "best_restart": idx}
    achieved = output_amplitudes(lam, 0)
    if res <= config.tolerance:
        status, notes = Status.SUCCESS, ()
    elif res <= config.not_found_threshold:
        status, notes = Status.NOT_FOUND, (f"best residual {res:.3e} above tolerance {config.tolerance:g}",)
    else:
        status, notes = Status.NOT_FOUND, (
            f"no solution found (best residual {res:.3e}); this is not a proof of infeasibility",
        )
    return SynthesisResult(status, target, lam, achieved, res, Method.SEARCH, notes, provenance)


def synthesize(target: ArrayLike, config: SearchConfig | None = None) -> SynthesisResult:
    """Closed form for three ports, search otherwise."""
    target = probability_distribution(target)
    d = check_dimension(target.size)
    if d == 3:
        return synthesize_3port(target)
    return synthesize_search(target, config)
