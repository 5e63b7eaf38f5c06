"""Desk-scale simulator and design toolkit for mechanical ground-state
cooling in a hybrid cavity with a Kerr magnon mode and injected squeezed
vacuum.

Layers, from model to oracle:

* model: shared types, unit conventions, validation, scheme taxonomy.
* steady: mean-field fixed points of the full three-mode model and the
  adiabatic elimination producing the effective linearized parameters.
* spectra: weak-coupling force spectra, cooling rates, phonon-number limits.
* optimum: heating nulls, squeezed-bath matching conditions, and the
  numerical optimizer over the two-photon coefficient.
* gaussian: exact covariance steady state (Lyapunov route) with
  Routh-Hurwitz stability.
* fock_oracle: truncated Fock-space master equation for independent
  cross-checks.
* cli: command line front end (spectra, rates, sweeps, figure presets).
"""

from .model import (
    CoolingReport,
    EffectiveParams,
    FullSystemParams,
    InfeasibleError,
    NumericalError,
    Scheme,
    SqueezedBathParams,
    ValidationError,
    classify,
    n_th_from_temperature,
    validate,
)
from .steady import AdiabaticMap, SteadyState, eliminate, solve_steady
from .spectra import (
    SpectrumPoint,
    a0_ratio,
    a_xi_ratio,
    rates,
    spectrum,
    susceptibility,
    v_hs,
    v_ks,
    v_sb,
)
from .optimum import OptimumResult, hs_condition, optimize_xi, ss_condition, xi_ks
from .gaussian import (
    CovarianceState,
    StabilityVerdict,
    diffusion_matrix,
    drift_matrix,
    evolve_covariance,
    exact_phonon,
    is_stable,
    lyapunov_steady,
    physicality_defect,
)
from .fock_oracle import (
    TruncationSpec,
    liouvillian,
    mode_occupations,
    quadrature_covariance,
    steady_density,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CoolingReport",
    "EffectiveParams",
    "FullSystemParams",
    "InfeasibleError",
    "NumericalError",
    "Scheme",
    "SqueezedBathParams",
    "ValidationError",
    "classify",
    "n_th_from_temperature",
    "validate",
    "AdiabaticMap",
    "SteadyState",
    "eliminate",
    "solve_steady",
    "SpectrumPoint",
    "a0_ratio",
    "a_xi_ratio",
    "rates",
    "spectrum",
    "susceptibility",
    "v_hs",
    "v_ks",
    "v_sb",
    "OptimumResult",
    "hs_condition",
    "optimize_xi",
    "ss_condition",
    "xi_ks",
    "CovarianceState",
    "StabilityVerdict",
    "diffusion_matrix",
    "drift_matrix",
    "evolve_covariance",
    "exact_phonon",
    "is_stable",
    "lyapunov_steady",
    "physicality_defect",
    "TruncationSpec",
    "liouvillian",
    "mode_occupations",
    "quadrature_covariance",
    "steady_density",
]
