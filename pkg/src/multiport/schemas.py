"""Request models shared by the HTTP service and the command line."""

from __future__ import annotations

import os
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core import FEASIBILITY_TOL

TOLERANCE_ENV = "MULTIPORT_TOLERANCE"


def default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return FEASIBILITY_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOLERANCE_ENV} must be positive, got {raw!r}")
    return value


class _Request(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PhaseInput(_Request):
    d: int = Field(ge=2)
    phases: Optional[List[float]] = None
    """Phase angles in radians."""
    phases_complex: Optional[List[str]] = None
    """Unit-modulus complex literals such as ``"0.5+0.866j"`` or ``"1-0i"``."""

    @model_validator(mode="after")
    def _one_phase_form(self):
        given = [x for x in (self.phases, self.phases_complex) if x is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of phases / phases_complex")
        if len(given[0]) != self.d:
            raise ValueError(f"expected {self.d} phases, got {len(given[0])}")
        return self


class SimulateRequest(PhaseInput):
    input_port: Optional[int] = Field(default=None, ge=0)
    fock: Optional[List[int]] = None
    max_photons: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _input(self):
        if self.input_port is not None and self.fock is not None:
            raise ValueError("give an input port or a Fock input, not both")
        if self.input_port is not None and self.input_port >= self.d:
            raise ValueError(f"input port {self.input_port} out of range for d={self.d}")
        if self.fock is not None and len(self.fock) != self.d:
            raise ValueError(f"Fock input needs {self.d} occupations")
        return self


class MultiphotonRequest(PhaseInput):
    fock: List[int]
    max_photons: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _input(self):
        if len(self.fock) != self.d:
            raise ValueError(f"Fock input needs {self.d} occupations")
        if any(n < 0 for n in self.fock):
            raise ValueError("occupations must be non-negative")
        return self


class CheckRequest(_Request):
    d: int = Field(ge=2)
    target: Optional[List[float]] = None
    two_photon_same_port: bool = False
    two_photon_two_port: bool = False
    two_modes: Optional[Tuple[int, int]] = None
    convention: Literal["fock", "monomial"] = "fock"
    tolerance: float = Field(default_factory=default_tolerance, gt=0)

    @model_validator(mode="after")
    def _mode(self):
        two_photon = self.two_photon_same_port or self.two_photon_two_port
        if self.two_photon_same_port and self.two_photon_two_port:
            raise ValueError("choose one two-photon input")
        if self.two_modes is not None:
            if self.target is not None or two_photon:
                raise ValueError("two_modes cannot be combined with a target")
            return self
        if self.target is None:
            raise ValueError("a target distribution is required")
        if two_photon:
            if self.d != 3 or len(self.target) != 6:
                raise ValueError("two-photon checks need d=3 and 6 probabilities")
        elif len(self.target) != self.d:
            raise ValueError(f"expected {self.d} probabilities, got {len(self.target)}")
        return self


class SynthesizeRequest(_Request):
    d: int = Field(ge=2)
    target: List[float]
    method: Literal["auto", "closed-form", "search"] = "auto"
    restarts: int = Field(default=64, ge=1)
    seed: int = Field(default=0, ge=0)
    max_iterations: int = Field(default=200, ge=1)
    tolerance: float = Field(default_factory=default_tolerance, gt=0)

    @model_validator(mode="after")
    def _shape(self):
        if len(self.target) != self.d:
            raise ValueError(f"expected {self.d} probabilities, got {len(self.target)}")
        if self.method == "closed-form" and self.d != 3:
            raise ValueError("the closed form exists only for d=3")
        return self


class SweepRequest(_Request):
    kind: Literal["simplex", "phase-grid", "magnitudes"]
    d: int = Field(ge=2)
    step: float = Field(default=0.02, gt=0, le=1)
    resolution: int = Field(default=200, ge=1)
    restarts: int = Field(default=64, ge=1)
    seed: int = Field(default=0, ge=0)
    max_points: int = Field(default=200_000, ge=1)
    tolerance: float = Field(default_factory=default_tolerance, gt=0)

    @model_validator(mode="after")
    def _shape(self):
        if self.kind in ("simplex", "phase-grid") and self.d != 3:
            raise ValueError(f"{self.kind} sweeps are defined for d=3")
        n = round(1 / self.step)
        if abs(n * self.step - 1) > 1e-9:
            raise ValueError("step must divide 1")
        return self
