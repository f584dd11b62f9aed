"""Simulation, feasibility and phase synthesis for two-multiport interferometers."""

__version__ = "0.1.0"

from .core import (
    dft_matrix,
    interferometer,
    output_amplitudes,
    phase_vector,
    phases_for_state,
    phases_from_angles,
)
from .feasibility import (
    FeasibilityReport,
    Verdict,
    concurrence_inequalities,
    concurrence_matrix,
    exact_condition_k_form,
    exact_condition_residuals,
    polygon_inequalities,
    two_mode_only_verdict,
)
from .fock import (
    FockVector,
    propagate,
    transfer_matrix,
    two_photon_same_port_conditions,
    two_photon_two_port_conditions,
)
from .synthesis import (
    SearchConfig,
    SynthesisResult,
    synthesize,
    synthesize_3port,
    synthesize_search,
    triangle_angles,
)
