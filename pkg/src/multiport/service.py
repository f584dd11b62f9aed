"""Command implementations shared by the HTTP service and the CLI.

Each command takes a validated request model and returns a :class:`Report`
whose ``as_dict()`` is the document emitted by both front ends::

    {"command", "input", "result", "residuals", "version"}

``outcome`` is ``"ok"``, ``"infeasible"`` or ``"not-found"`` and maps onto
the CLI exit codes 0, 3 and 4.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .core import (
    PhaseError,
    interferometer,
    output_amplitudes,
    phase_vector,
)
from .feasibility import (
    FeasibilityReport,
    TwoModeVerdict,
    Verdict,
    concurrence_inequalities,
    concurrence_matrix,
    four_port_margin,
    polygon_inequalities,
    two_mode_only_verdict,
)
from .fock import (
    propagate,
    transfer_matrix,
    two_photon_same_port_conditions,
    two_photon_two_port_conditions,
)
from .schemas import (
    CheckRequest,
    MultiphotonRequest,
    PhaseInput,
    SimulateRequest,
    SweepRequest,
    SynthesizeRequest,
)
from .synthesis import (
    SearchConfig,
    Status,
    SynthesisResult,
    synthesize_3port,
    synthesize_search,
)

COMPLEX_UNIT_TOL = 1e-6
GAP_THRESHOLD = 1e-4
ZERO_OUTPUT = 1e-6

EXIT_CODES = {"ok": 0, "infeasible": 3, "not-found": 4}


class InvalidInput(ValueError):
    """Request that is well-formed but numerically unusable."""


@dataclass
class Report:
    command: str
    input: dict[str, Any]
    result: dict[str, Any]
    residuals: dict[str, Any] = field(default_factory=dict)
    outcome: str = "ok"
    rows: list[dict[str, Any]] | None = None
    columns: list[str] | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def as_dict(self) -> dict[str, Any]:
        result = dict(self.result, outcome=self.outcome)
        if self.rows is not None:
            result["columns"] = self.columns
            result["rows"] = self.rows
        return {
            "command": self.command,
            "input": self.input,
            "result": result,
            "residuals": self.residuals,
            "version": __version__,
        }


def cpair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def cvec(v) -> list[list[float]]:
    return [cpair(z) for z in np.asarray(v).ravel()]


def parse_complex(text: str) -> complex:
    """``"a+bi"`` or ``"a+bj"`` (also bare ``"i"``-style imaginary parts)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t.endswith("j") and (t in ("j", "+j", "-j") or t[-2] in "+-"):
        t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise InvalidInput(f"cannot parse complex literal {text!r}") from None


def request_phases(req: PhaseInput) -> np.ndarray:
    if req.phases is not None:
        return phase_vector(np.exp(1j * np.asarray(req.phases, dtype=float)))
    raw = np.array([parse_complex(s) for s in req.phases_complex])
    try:
        return phase_vector(raw, tol=COMPLEX_UNIT_TOL)
    except PhaseError as exc:
        raise InvalidInput(str(exc)) from None


def _target(values, d: int) -> np.ndarray:
    p = np.asarray(values, dtype=float)
    if p.size != d or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidInput("target must hold non-negative finite probabilities")
    if abs(p.sum() - 1.0) > 1e-10:
        raise InvalidInput(f"target probabilities sum to {p.sum():.15g}, not 1")
    return p


def report_dict(rep: FeasibilityReport) -> dict[str, Any]:
    details = {}
    for key, value in rep.details.items():
        if key == "lam":
            details["phases_rad"] = np.angle(value).tolist()
            details["phases_complex"] = cvec(value)
        else:
            details[key] = value
    return {
        "verdict": rep.verdict.value,
        "notes": list(rep.notes),
        "exact_residuals": cvec(rep.exact_residuals),
        "polygon_margins": [[m, p, g] for m, p, g in rep.polygon_margins],
        "details": details,
    }


def synthesis_dict(res: SynthesisResult) -> dict[str, Any]:
    out: dict[str, Any] = {
        "status": res.status.value,
        "method": res.method.value if res.method else None,
        "notes": list(res.notes),
        "residual": res.residual if math.isfinite(res.residual) else None,
    }
    if res.lam is not None:
        out["phases_rad"] = np.angle(res.lam).tolist()
        out["phases_complex"] = cvec(res.lam)
        out["achieved_amplitudes"] = cvec(res.achieved)
        out["achieved_probabilities"] = (np.abs(res.achieved) ** 2).tolist()
    out["details"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in res.details.items()}
    return out


def simulate(req: SimulateRequest) -> Report:
    lam = request_phases(req)
    u = interferometer(lam)
    residuals = {"unitarity": float(np.linalg.norm(u @ u.conj().T - np.eye(req.d)))}
    result: dict[str, Any] = {"phases_rad": np.angle(lam).tolist()}
    if req.fock is not None:
        out = propagate(req.fock, transfer_matrix(lam), max_photons=req.max_photons)
        result["fock"] = [list(r) for r in out.records()]
        result["probabilities"] = {lbl: float(re * re + im * im) for lbl, re, im in out.records()}
        residuals["normalization"] = abs(out.norm - 1.0)
    else:
        c = output_amplitudes(lam, req.input_port or 0)
        result["input_port"] = req.input_port or 0
        result["amplitudes"] = cvec(c)
        result["probabilities"] = (np.abs(c) ** 2).tolist()
        result["concurrence"] = concurrence_matrix(c).tolist()
        residuals["normalization"] = abs(float(np.linalg.norm(c)) - 1.0)
    return Report("simulate", req.model_dump(), result, residuals)


def multiphoton(req: MultiphotonRequest) -> Report:
    lam = request_phases(req)
    v = transfer_matrix(lam)
    out = propagate(req.fock, v, max_photons=req.max_photons)
    result = {
        "photons": sum(req.fock),
        "basis_size": len(out.basis),
        "transfer_matrix": [cvec(row) for row in v],
        "fock": [list(r) for r in out.records()],
    }
    residuals = {
        "normalization": abs(out.norm - 1.0),
        "transfer_unitarity": float(np.linalg.norm(v @ v.conj().T - np.eye(req.d))),
    }
    return Report("multiphoton", req.model_dump(), result, residuals)


def check(req: CheckRequest) -> Report:
    inp = req.model_dump()
    if req.two_modes is not None:
        a, b = sorted(req.two_modes)
        if not (0 <= a < b < req.d):
            raise InvalidInput(f"need two distinct modes in 0..{req.d - 1}")
        verdict = two_mode_only_verdict(req.d, a, b)
        outcome = "ok" if verdict is TwoModeVerdict.POSSIBLE else "infeasible"
        return Report("check", inp, {"two_modes": [a, b], "verdict": verdict.value}, {}, outcome)

    if req.two_photon_same_port or req.two_photon_two_port:
        p = _target(req.target, 6)
        fn = two_photon_same_port_conditions if req.two_photon_same_port else two_photon_two_port_conditions
        rep = fn(p, convention=req.convention, tol=req.tolerance)
        outcome = "infeasible" if rep.verdict is Verdict.INFEASIBLE else "ok"
        residuals = {"max_condition_residual": rep.max_residual}
        if "round_trip_residual" in rep.details:
            residuals["round_trip"] = rep.details["round_trip_residual"]
        return Report("check", inp, report_dict(rep), residuals, outcome)

    p = _target(req.target, req.d)
    poly = polygon_inequalities(p)
    conc = concurrence_inequalities(concurrence_matrix(np.sqrt(p)))
    result = report_dict(poly)
    result["concurrence_verdict"] = conc.verdict.value
    residuals = {"min_polygon_margin": poly.min_margin}
    if req.d <= 3 and poly.verdict is not Verdict.INFEASIBLE:
        synth = synthesize_3port(p) if req.d == 3 else synthesize_search(p)
        ok = synth.status is Status.SUCCESS
        result["verdict"] = Verdict.FEASIBLE.value if ok else Verdict.INFEASIBLE.value
        result["notes"] = list(synth.notes) or [
            "triangle inequalities are sufficient for d=3" if req.d == 3 else "every d=2 distribution is reachable"
        ]
        result["synthesis"] = synthesis_dict(synth)
        residuals["synthesis"] = synth.residual
    elif req.d == 3:
        synth = synthesize_3port(p)
        result["notes"] = list(synth.notes) or result["notes"]
    outcome = "infeasible" if result["verdict"] == Verdict.INFEASIBLE.value else "ok"
    return Report("check", inp, result, residuals, outcome)


def synthesize(req: SynthesizeRequest) -> Report:
    p = _target(req.target, req.d)
    if req.method == "closed-form" or (req.method == "auto" and req.d == 3):
        res = synthesize_3port(p)
    else:
        cfg = SearchConfig(
            restarts=req.restarts, max_iterations=req.max_iterations, seed=req.seed, tolerance=req.tolerance
        )
        res = synthesize_search(p, cfg)
    outcome = {Status.SUCCESS: "ok", Status.INFEASIBLE: "infeasible", Status.NOT_FOUND: "not-found"}[res.status]
    residuals = {"magnitude": res.residual if math.isfinite(res.residual) else None}
    return Report("synthesize", req.model_dump(), synthesis_dict(res), residuals, outcome)


def _simplex_points(d: int, n: int):
    for head in itertools.product(range(n + 1), repeat=d - 1):
        rest = n - sum(head)
        if rest >= 0:
            yield np.array(head + (rest,), dtype=float) / n


def simplex_size(d: int, n: int) -> int:
    return math.comb(n + d - 1, d - 1)


def _sweep_simplex(req: SweepRequest):
    n = round(1 / req.step)
    cfg = SearchConfig(restarts=req.restarts, seed=req.seed, tolerance=req.tolerance, precheck=False)
    cols = ["p0", "p1", "p2", "triangle_min_margin", "closed_form", "search", "search_residual", "agree"]
    rows = []
    for p in _simplex_points(3, n):
        closed = synthesize_3port(p)
        search = synthesize_search(p, cfg)
        margin = polygon_inequalities(p).min_margin
        rows.append(
            dict(
                p0=p[0], p1=p[1], p2=p[2], triangle_min_margin=margin,
                closed_form=closed.status.value, search=search.status.value,
                search_residual=search.residual, agree=closed.success == search.success,
            )
        )
    summary = {
        "points": len(rows),
        "disagreements": sum(not r["agree"] for r in rows),
        "feasible": sum(r["closed_form"] == "success" for r in rows),
    }
    return cols, rows, summary


def phase_grid_magnitudes(resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Output moduli for ``theta_0 = 0`` and ``theta_1, theta_2`` on a uniform grid."""
    k = np.arange(resolution)
    t1, t2 = np.meshgrid(2 * np.pi * k / resolution, 2 * np.pi * k / resolution, indexing="ij")
    lam = np.stack([np.ones_like(t1, dtype=complex), np.exp(1j * t1), np.exp(1j * t2)], axis=-1)
    w = np.exp(2j * np.pi / 3)
    f = np.array([[w ** ((m * n) % 3) for n in range(3)] for m in range(3)]) / np.sqrt(3)
    c = lam @ f.T / np.sqrt(3)
    return t1.ravel(), t2.ravel(), np.abs(c).reshape(-1, 3)


def _sweep_phase_grid(req: SweepRequest):
    t1, t2, mags = phase_grid_magnitudes(req.resolution)
    nonzero = (mags > ZERO_OUTPUT).sum(axis=1)
    cols = ["theta1", "theta2", "abs_c0", "abs_c1", "abs_c2", "nonzero_outputs"]
    rows = [
        dict(theta1=a, theta2=b, abs_c0=m[0], abs_c1=m[1], abs_c2=m[2], nonzero_outputs=int(k))
        for a, b, m, k in zip(t1, t2, mags, nonzero)
    ]
    summary = {
        "points": len(rows),
        "exactly_two_nonzero": int((nonzero == 2).sum()),
        "zero_threshold": ZERO_OUTPUT,
    }
    return cols, rows, summary


def _sweep_magnitudes(req: SweepRequest):
    d = req.d
    n = round(1 / req.step)
    cfg = SearchConfig(restarts=req.restarts, seed=req.seed, tolerance=req.tolerance)
    cols = [f"p{k}" for k in range(d)] + [
        "polygon_min_margin", "polygon", "search", "search_residual", "best_restart", "seed", "restarts", "gap",
    ]
    if d == 4:
        cols.append("four_port_margin")
    rows = []
    for p in _simplex_points(d, n):
        poly = polygon_inequalities(p)
        row = {f"p{k}": p[k] for k in range(d)}
        row.update(polygon_min_margin=poly.min_margin, polygon=poly.verdict.value, seed=req.seed, restarts=req.restarts)
        if poly.verdict is Verdict.INFEASIBLE:
            row.update(search="skipped", search_residual=None, best_restart=None, gap=False)
        else:
            res = synthesize_search(p, cfg)
            row.update(
                search=res.status.value,
                search_residual=res.residual,
                best_restart=res.details.get("best_restart"),
                gap=res.residual > GAP_THRESHOLD,
            )
        if d == 4:
            row["four_port_margin"] = four_port_margin(p)
        rows.append(row)
    summary = {
        "points": len(rows),
        "polygon_passed": sum(r["polygon"] != "infeasible" for r in rows),
        "gap_points": sum(bool(r["gap"]) for r in rows),
        "gap_threshold": GAP_THRESHOLD,
        "evidence_only": "search failures are numerical evidence, not a proof of infeasibility",
    }
    return cols, rows, summary


def sweep(req: SweepRequest) -> Report:
    n = round(1 / req.step)
    size = req.resolution**2 if req.kind == "phase-grid" else simplex_size(req.d, n)
    if size > req.max_points:
        raise InvalidInput(f"grid has {size} points, above the cap of {req.max_points}")
    fn = {"simplex": _sweep_simplex, "phase-grid": _sweep_phase_grid, "magnitudes": _sweep_magnitudes}[req.kind]
    cols, rows, summary = fn(req)
    return Report("sweep", req.model_dump(), {"kind": req.kind, "summary": summary}, {}, "ok", rows, cols)


COMMANDS = {
    "simulate": (SimulateRequest, simulate),
    "check": (CheckRequest, check),
    "synthesize": (SynthesizeRequest, synthesize),
    "multiphoton": (MultiphotonRequest, multiphoton),
    "sweep": (SweepRequest, sweep),
}
