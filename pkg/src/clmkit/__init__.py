"""Continuum Landau modes of non-Hermitian lattices: models, spectra, response and dynamics."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ClmError,
    ConvergenceError,
    CoverageError,
    DegenerateDriftError,
    DivergenceError,
    InsufficientDataError,
    InvalidSpecError,
    NoFieldError,
    ResonanceError,
    StabilityError,
    UsageError,
)
from .lattice import (  # noqa: E402
    HamiltonianMatrix,
    MassProfile,
    SiteIndexer,
    build_1d_gainloss,
    build_1d_nonreciprocal,
    build_2d_clm,
)
from .spectral import EigenDecomposition, StateStats, eig, linear_trend, participation_ratio, spectrum_table  # noqa: E402
from .response import DriveSpec, SweepResult, frequency_sweep, steady_state, sweep_metrics  # noqa: E402
from .dynamics import EvolutionResult, WavepacketSpec, closed_form_evolution, integrate_rk4  # noqa: E402
from .export import export  # noqa: E402
from .scenarios import ScenarioSpec, run_scenario  # noqa: E402
