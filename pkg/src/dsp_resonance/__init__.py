"""Discrete shock profiles of the Lax-Friedrichs scheme and their speed sensitivity.

A numerical laboratory that (i) computes scalar traveling profiles of the
Lax-Friedrichs scheme for a decoupled 2x2 system, (ii) builds the coupled
second component through the scheme's binomial Green's kernel, and (iii)
measures how the downstream tail of the second component varies when the
profile speed moves between nearby rationals (1/2 versus k/(2k+1)).
"""

__version__ = "0.1.0"

from .kernels import (
    LatticeIndex,
    KernelSample,
    SawtoothFamily,
    binom_kernel,
    binom_kernel_many,
    frac,
    heat_kernel,
    heat_kernel_deriv,
    kernel_row,
    kernel_row_arrays,
    kernel_sample,
    sawtooth,
    sawtooth_family,
)
from .heat_analog import (
    DecayFitReport,
    PulseTrainSpec,
    discrete_time_profile,
    fit_downstream_decay,
    heat_tv_demo,
    lattice_profile,
    lattice_tv,
    phi_deriv,
    phi_profile,
    resonance_gap,
)
from .scalar_profile import (
    FluxSpec,
    RationalSpeed,
    ScalarDSP,
    SourceProfile,
    WindowAverage,
    H_from_psi,
    burgers_flux,
    compute_scalar_dsp,
    dsp1_residual,
    psi_bump,
    psi_from_g,
    quintic_step,
    rh_speed,
)
from .dsp_construct import (
    GridFunction,
    ProbeContext,
    SecondComponent,
    V_lambda,
    V_via_integral,
    build_second_component,
    dsp2_residual,
    duhamel_sum,
    v_probe,
)
from .approx_analysis import (
    ErrorBudget,
    ResonanceParams,
    clt_error_scan,
    frac_identity_check,
    parity_sum,
    tail_mass_discrete,
    tail_mass_heat,
    technical_lhs_rhs,
    v_minus_w,
    w_diff_closed_form,
    w_probe,
)
from .variation import (
    OscillationGrid,
    SpeedFamily,
    VariationReport,
    H0_eval,
    delta_V,
    delta_V_surrogate,
    far_window_tv,
    oscillation_points,
    run_study,
    translation_check,
    tv_on_grid,
)
from .errors import (
    CflViolation,
    EntropyViolation,
    NonConvergence,
    QuadratureError,
    SupportDetectionError,
)
