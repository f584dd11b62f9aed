"""Multi-photon propagation and two-photon feasibility for three ports.

Output mode operators relate to input ones through the transfer matrix
``V = U.T``; a photon entering mode ``m`` leaves in ``sum_k V[m, k] b_k^+``.
For the F.P.F interferometer ``V[m, n] = c[(m + n) % d]`` where ``c`` is the
single-photon output from port 0.

Amplitudes between Fock states come from permanents of ``V`` with rows
repeated by input occupation and columns by output occupation, divided by
``sqrt(prod(n_i!) * prod(m_j!))``.

Two conventions exist for the two-photon closed forms. ``"fock"`` uses
normalized number states, so a photon pair split over two modes carries a
factor ``sqrt(2)`` relative to a bunched pair. ``"monomial"`` keeps the raw
coefficients of the creation-operator polynomial (factor ``2``) and then
renormalizes the vector; it is kept for comparison and does not describe measured
probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
    FEASIBILITY_TOL,
    check_dimension,
    interferometer,
    output_amplitudes,
    phase_vector,
    phases_for_state,
)
from .feasibility import ZERO_TOL, FeasibilityReport, Verdict
from .synthesis import closed_form_state, equivalent_3port_states, synthesize_3port, triangle_margins

MAX_PHOTONS = 6

CONVENTIONS = ("fock", "monomial")

TWO_PHOTON_ORDER: tuple[tuple[int, int, int], ...] = (
    (2, 0, 0),
    (0, 2, 0),
    (0, 0, 2),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
)
"""Presentation order used by the two-photon closed forms and targets."""


class PhotonNumberError(ValueError):
    pass


def _check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    return convention


def occupation_label(occ: Sequence[int]) -> str:
    if all(n < 10 for n in occ):
        return "".join(str(n) for n in occ)
    return ",".join(str(n) for n in occ)


def parse_occupation(text: str) -> tuple[int, ...]:
    """``"2,0,0"`` or ``"200"`` to ``(2, 0, 0)``."""
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    try:
        occ = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad occupation {text!r}") from None
    if any(n < 0 for n in occ):
        raise ValueError(f"occupations must be non-negative: {text!r}")
    return occ


def fock_basis(n: int, d: int) -> list[tuple[int, ...]]:
    """All ``d``-mode patterns with ``n`` photons, lexicographically descending."""
    d = check_dimension(d)
    if n < 0:
        raise PhotonNumberError("photon number must be non-negative")

    def rec(left, modes):
        if modes == 1:
            yield (left,)
            return
        for k in range(left, -1, -1):
            for tail in rec(left - k, modes - 1):
                yield (k,) + tail

    return list(rec(n, d))


@dataclass(frozen=True)
class FockVector:
    """Superposition over the full ``n``-photon sector of ``d`` modes."""

    basis: tuple[tuple[int, ...], ...]
    amplitudes: NDArray[np.complex128]

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, occ: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.index(tuple(occ))])

    def in_order(self, order: Iterable[Sequence[int]]) -> NDArray[np.complex128]:
        return np.array([self.amplitude(o) for o in order])

    def records(self) -> list[tuple[str, float, float]]:
        return [
            (occupation_label(o), float(a.real), float(a.imag))
            for o, a in zip(self.basis, self.amplitudes)
        ]


def transfer_matrix(lam: ArrayLike) -> NDArray[np.complex128]:
    """``V[m, n] = c[(m + n) % d]`` built from the port-0 output amplitudes."""
    lam = phase_vector(lam)
    d = lam.size
    c = output_amplitudes(lam, 0)
    idx = np.arange(d)
    v = c[(idx[:, None] + idx[None, :]) % d]
    u = interferometer(lam)
    if not np.allclose(v, u.T, atol=1e-12, rtol=0):
        raise AssertionError("transfer matrix disagrees with the transposed interferometer")
    return v


def permanent(m: ArrayLike) -> complex:
    """Ryser's formula with Gray-code subset updates, O(2^n n)."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0j
    in_set = [False] * n
    for k in range(1, 2**n):
        j = (k & -k).bit_length() - 1  # bit that flips in the Gray code
        if in_set[j]:
            row_sums -= m[:, j]
        else:
            row_sums += m[:, j]
        in_set[j] = not in_set[j]
        total += (-1) ** (k ^ (k >> 1)).bit_count() * np.prod(row_sums)
    return (-1) ** n * total


def _expand(occ: Sequence[int]) -> list[int]:
    return [mode for mode, count in enumerate(occ) for _ in range(count)]


def transition_amplitude(v: ArrayLike, inp: Sequence[int], out: Sequence[int]) -> complex:
    v = np.asarray(v)
    rows = _expand(inp)
    cols = _expand(out)
    if len(rows) != len(cols):
        return 0j
    norm = math.sqrt(math.prod(math.factorial(k) for k in inp) * math.prod(math.factorial(k) for k in out))
    return permanent(v[np.ix_(rows, cols)]) / norm


def propagate(input_state: Sequence[int], v: ArrayLike, max_photons: int = MAX_PHOTONS) -> FockVector:
    """Output state for a Fock input through transfer matrix ``v``."""
    v = np.asarray(v, dtype=np.complex128)
    d = check_dimension(v.shape[0])
    occ = tuple(int(k) for k in input_state)
    if len(occ) != d:
        raise ValueError(f"input has {len(occ)} modes, transfer matrix has {d}")
    if any(k < 0 for k in occ):
        raise ValueError("occupations must be non-negative")
    n = sum(occ)
    if n > max_photons:
        raise PhotonNumberError(f"{n} photons exceeds the limit of {max_photons}")
    basis = tuple(fock_basis(n, d))
    amps = np.array([transition_amplitude(v, occ, out) for out in basis])
    return FockVector(basis, amps)


def expand_creation_polynomial(input_state: Sequence[int], v: ArrayLike) -> FockVector:
    """Propagation by multiplying out ``prod_m (sum_k V[m, k] b_k^+)^{n_m}``.

    Independent of :func:`permanent`; meant as a cross-check for small sizes.
    """
    v = np.asarray(v, dtype=np.complex128)
    d = v.shape[0]
    occ = tuple(int(k) for k in input_state)
    poly: dict[tuple[int, ...], complex] = {(0,) * d: 1.0 + 0j}
    for mode in _expand(occ):
        nxt: dict[tuple[int, ...], complex] = {}
        for mono, coef in poly.items():
            for k in range(d):
                key = mono[:k] + (mono[k] + 1,) + mono[k + 1 :]
                nxt[key] = nxt.get(key, 0j) + coef * v[mode, k]
        poly = nxt
    in_norm = math.sqrt(math.prod(math.factorial(k) for k in occ))
    basis = tuple(fock_basis(sum(occ), d))
    amps = []
    for out in basis:
        # (b^+)^k |0> = sqrt(k!) |k>
        out_norm = math.sqrt(math.prod(math.factorial(k) for k in out))
        amps.append(poly.get(out, 0j) * out_norm / in_norm)
    return FockVector(basis, np.array(amps))


def _normalized(x: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return x / np.linalg.norm(x)


def same_port_closed_form(c: ArrayLike, convention: str = "fock") -> NDArray[np.complex128]:
    """Output of ``|200>`` in :data:`TWO_PHOTON_ORDER` from port-0 amplitudes ``c``."""
    c0, c1, c2 = np.asarray(c, dtype=np.complex128)
    k = math.sqrt(2) if _check_convention(convention) == "fock" else 2.0
    vec = np.array([c0**2, c1**2, c2**2, k * c0 * c1, k * c0 * c2, k * c1 * c2])
    return vec if convention == "fock" else _normalized(vec)


def two_port_closed_form(c: ArrayLike, convention: str = "fock") -> NDArray[np.complex128]:
    """Output of ``|110>`` in :data:`TWO_PHOTON_ORDER` from port-0 amplitudes ``c``."""
    c0, c1, c2 = np.asarray(c, dtype=np.complex128)
    k = math.sqrt(2) if _check_convention(convention) == "fock" else 1.0
    vec = np.array(
        [
            k * c0 * c1,
            k * c1 * c2,
            k * c2 * c0,
            c0 * c2 + c1**2,
            c1 * c2 + c0**2,
            c0 * c1 + c2**2,
        ]
    )
    return vec if convention == "fock" else _normalized(vec)


def _two_photon_target(target: ArrayLike) -> NDArray[np.float64]:
    p = np.asarray(target, dtype=float)
    if p.shape != (6,):
        raise ValueError(f"need 6 probabilities for {[occupation_label(o) for o in TWO_PHOTON_ORDER]}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("two-photon target must be a probability distribution")
    return p


def _phases_of(c: NDArray[np.complex128]) -> NDArray[np.complex128]:
    lam = phases_for_state(c).lam
    return lam / np.abs(lam)


def _verify(closed_form, candidates, alpha, convention):
    best = None
    for c in candidates:
        lam = _phases_of(c)
        got = np.abs(closed_form(output_amplitudes(lam, 0), convention))
        res = float(np.max(np.abs(got - alpha)))
        if best is None or res < best[0]:
            best = (res, lam)
    return best


def two_photon_same_port_conditions(
    target: ArrayLike, convention: str = "fock", tol: float = FEASIBILITY_TOL
) -> FeasibilityReport:
    """Can ``|200>`` be steered into this six-outcome distribution?

    Checks the three pair/bunch product relations, then the triangle
    inequalities on the implied single-photon moduli. A feasible report
    carries the phases in ``details["lam"]``; they are the single-photon
    phases for those moduli.
    """
    _check_convention(convention)
    p = _two_photon_target(target)
    alpha = np.sqrt(p)
    k = math.sqrt(2) if convention == "fock" else 2.0
    sym = "sqrt(2)" if convention == "fock" else "2"
    checks = [(3, 0, 1), (4, 0, 2), (5, 1, 2)]
    residuals = []
    notes = []
    for pair, i, j in checks:
        want = k * math.sqrt(alpha[i] * alpha[j])
        r = alpha[pair] - want
        residuals.append(complex(r))
        if abs(r) > tol:
            notes.append(
                f"|a{pair}| = {alpha[pair]:.12g} but {sym}*sqrt(|a{i}||a{j}|) = {want:.12g} "
                f"({occupation_label(TWO_PHOTON_ORDER[pair])} vs "
                f"{occupation_label(TWO_PHOTON_ORDER[i])}, {occupation_label(TWO_PHOTON_ORDER[j])})"
            )
    details = {"convention": convention, "product_residuals": [float(r.real) for r in residuals]}
    if notes:
        return FeasibilityReport(Verdict.INFEASIBLE, tuple(residuals), notes=tuple(notes), details=details)

    # |alpha_k| is proportional to |c_k|^2 on the bunched outcomes
    single = alpha[:3] / alpha[:3].sum()
    margins = triangle_margins(np.sqrt(single))
    details["single_photon_distribution"] = single.tolist()
    details["triangle_margins"] = margins
    synth = synthesize_3port(single)
    if not synth.success:
        return FeasibilityReport(
            Verdict.INFEASIBLE, tuple(residuals), notes=synth.notes or ("single-photon synthesis failed",), details=details
        )
    got = np.abs(same_port_closed_form(synth.achieved, convention))
    details["lam"] = synth.lam
    details["round_trip_residual"] = float(np.max(np.abs(got - alpha)))
    return FeasibilityReport(
        Verdict.FEASIBLE,
        tuple(residuals),
        notes=("product relations and triangle inequalities hold",),
        details=details,
    )


def two_photon_two_port_conditions(
    target: ArrayLike, convention: str = "fock", tol: float = FEASIBILITY_TOL
) -> FeasibilityReport:
    """Can ``|110>`` be steered into this six-outcome distribution?

    The bunched outcomes fix ``|c_k|`` up to scale through pairwise
    products; the remaining outcomes and the triangle inequalities give
    necessary checks. The verdict is settled by trying every reachable
    single-photon state with those moduli (six, for strictly positive
    moduli) and comparing the resulting two-photon output to the target.
    """
    _check_convention(convention)
    p = _two_photon_target(target)
    alpha = np.sqrt(p)
    a0, a1, a2 = alpha[:3]
    details: dict = {"convention": convention}
    notes: list[str] = []

    if min(a0, a1, a2) < ZERO_TOL:
        # any zero product forces a zero c_k, which for d = 3 leaves one nonzero mode
        candidates = [np.eye(3, dtype=complex)[k] for k in range(3)]
        notes.append("a bunched outcome has zero probability: only single-mode states remain")
    else:
        mags2 = np.array([a0 * a2 / a1, a0 * a1 / a2, a1 * a2 / a0])
        mags = np.sqrt(mags2 / mags2.sum())
        details["single_photon_distribution"] = (mags**2).tolist()
        margins = triangle_margins(mags)
        details["triangle_margins"] = margins
        violated = [name for name, s in margins.items() if s < -1e-12]
        if violated:
            return FeasibilityReport(
                Verdict.INFEASIBLE,
                notes=tuple(f"triangle inequality violated: {v}" for v in violated),
                details=details,
            )
        scale = a0 / (mags[0] * mags[1]) if convention == "monomial" else math.sqrt(2)
        if convention == "fock" and abs(a0 - scale * mags[0] * mags[1]) > tol:
            notes.append("bunched outcomes are inconsistent with a normalized single-photon state")
        m0, m1, m2 = mags
        norm = scale / (math.sqrt(2) if convention == "fock" else 1.0)
        for idx, (x, y) in zip((3, 4, 5), ((m0 * m2, m1**2), (m1 * m2, m0**2), (m0 * m1, m2**2))):
            lo, hi = norm * abs(x - y), norm * (x + y)
            if not lo - tol <= alpha[idx] <= hi + tol:
                notes.append(
                    f"|a{idx}| = {alpha[idx]:.12g} outside the reachable range [{lo:.12g}, {hi:.12g}]"
                )
        if notes:
            return FeasibilityReport(Verdict.INFEASIBLE, notes=tuple(notes), details=details)
        candidates = equivalent_3port_states(closed_form_state(mags))

    res, lam = _verify(two_port_closed_form, candidates, alpha, convention)
    details["round_trip_residual"] = res
    if res <= tol:
        details["lam"] = lam
        return FeasibilityReport(
            Verdict.FEASIBLE, notes=tuple(notes) + ("round trip through |110> reproduces the target",), details=details
        )
    return FeasibilityReport(
        Verdict.INFEASIBLE,
        notes=tuple(notes) + (f"no reachable state reproduces the target (best residual {res:.3e})",),
        details=details,
    )


def two_photon_distribution(lam: ArrayLike, input_state: Sequence[int]) -> NDArray[np.float64]:
    """Probabilities in :data:`TWO_PHOTON_ORDER` for a 3-port, two-photon input."""
    out = propagate(input_state, transfer_matrix(lam))
    return np.abs(out.in_order(TWO_PHOTON_ORDER)) ** 2
