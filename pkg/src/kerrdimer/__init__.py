"""kerrdimer: forward modeling and inference for a double-pumped Kerr
parametric amplifier built from two coupled nonlinear resonators."""

from .model_core import (
    CircuitParams,
    Cooperativities,
    EffectiveCouplings,
    HybridizedParams,
    PumpConfig,
    PumpTone,
    cooperativities,
    effective_couplings,
    hybridize,
    kerr_shifted_frequencies,
)
from .meanfield import (
    MeanFieldSolution,
    SpectroscopyResult,
    select_branch,
    solve_double_pump,
    solve_single_pump,
    spectroscopy_response,
)
from .stability import (
    DriftMatrix,
    FloquetMatrix,
    StabilityReport,
    classify,
    drift_matrix,
    eigenvalues_closed_form,
    floquet_matrix,
)
from .response import (
    GainProfile,
    InstabilityError,
    gain_profile_floquet,
    gain_profile_quadrature,
    gain_zero_freq_closed_form,
    phase_sensitive_gain,
    scattering_modes,
    scattering_quadrature,
    single_pump_gain_closed_form,
)
from .noise import (
    NoiseSpectrum,
    added_noise,
    added_noise_spectrum,
    output_noise,
    quantum_limit,
)
from .analysis import (
    balanced_couplings,
    eigenvalue_sweep,
    gbw_scan,
    kappa_equivalent,
    retune_double_pump,
    retune_single_pump,
    tune_to_bp,
)
from .inference import (
    DephasingModelParams,
    FitResult,
    dephasing_rate,
    fit_attenuation,
    fit_dephasing,
    fit_kerr,
    fit_pump_powers,
)

__version__ = "0.1.0"
