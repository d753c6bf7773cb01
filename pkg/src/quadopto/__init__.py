"""Steady states, stability, position spectra and normal-mode splitting of an
optomechanical cavity with linear and quadratic dispersive coupling."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    CothConvention,
    DriveConfig,
    NoiseModel,
    SystemParams,
    drive_amplitude,
    load_config,
    noise_model,
    thermal_photon_number,
)
from .steady_state import (  # noqa: E402
    SteadyStateBranch,
    effective_coupling,
    operating_branch,
    solve_steady_states,
    steady_state_polynomial,
)
from .dynamics import DriftMatrix, StabilityReport, build_drift_matrix, routh_hurwitz  # noqa: E402
from .spectrum import (  # noqa: E402
    SpectrumMethod,
    SpectrumResult,
    TransferCoefficients,
    compute_spectrum,
    s_xx_analytic,
    s_xx_oracle,
    s_xx_transfer,
    transfer_coefficients,
)
from .peaks import NmsPeaks, approx_peaks, exact_peaks, nms_threshold, quartic_roots  # noqa: E402

__all__ = [
    "CothConvention",
    "DriveConfig",
    "DriftMatrix",
    "NmsPeaks",
    "NoiseModel",
    "SpectrumMethod",
    "SpectrumResult",
    "StabilityReport",
    "SteadyStateBranch",
    "SystemParams",
    "TransferCoefficients",
    "approx_peaks",
    "build_drift_matrix",
    "compute_spectrum",
    "drive_amplitude",
    "effective_coupling",
    "exact_peaks",
    "load_config",
    "nms_threshold",
    "noise_model",
    "operating_branch",
    "quartic_roots",
    "routh_hurwitz",
    "s_xx_analytic",
    "s_xx_oracle",
    "s_xx_transfer",
    "solve_steady_states",
    "steady_state_polynomial",
    "thermal_photon_number",
    "transfer_coefficients",
]
