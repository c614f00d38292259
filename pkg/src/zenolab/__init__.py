"""Exact spectral solution, survival dynamics and Zeno / anti-Zeno scans for a
two-level system coupled to a continuum through its upper level."""
from .errors import (
    BoundStateSearchError,
    ClosureError,
    DomainError,
    PoleError,
    ResolutionBudgetExceeded,
    ZenoLabError,
)
from .model import (
    ModelParams,
    beta_minus,
    beta_plus,
    beta_prime,
    beta_real,
    coupling_density,
    form_factor,
    pv_integral,
    self_energy,
)
from .spectral import (
    BoundState,
    ContinuumAmplitudes,
    PoleEstimate,
    closure_sum,
    continuum_amplitudes,
    cross_sum,
    density_A,
    density_B,
    find_bound_states,
    pole_estimates,
)
from .evolution import (
    SurvivalCurve,
    fit_decay_rate,
    short_time_exponent,
    survival_amplitude,
    survival_curve,
    survival_deficit,
    survival_probability,
)
from .zeno import (
    MeasurementSchedule,
    ZenoVerdict,
    classify,
    effective_rate,
    find_inflection,
    interrupted_curve,
    interrupted_probability,
    tau_scan,
)
from . import oracle

__version__ = "0.1.0"
