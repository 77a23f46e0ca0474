"""Spring-model analysis of review-rating dynamics.

Ingest JSON-lines business/review data, rank businesses by review count,
fit rank/size power laws, track running and yearly averages, model rating
deviations as a forced damped oscillator (closed form, RK4, Nelder-Mead
fit), detect cycles with Lomb-Scargle, and build geospatial heat grids.
"""

__version__ = "0.1.0"

from .errors import (
    FitError,
    IngestError,
    OscillatorError,
    PeriodicityError,
    RatingDynamicsError,
    SeriesError,
    SpatialError,
)
from .fit import OscillatorFit, PowerLawFit, fit_oscillator, fit_power_law
from .ingest import (
    Business,
    Dataset,
    Review,
    filter_by_radius,
    haversine_km,
    load_dataset,
    normalize_name,
    parse_dataset,
    review_counts,
)
from .optimize import SimplexOptions, nelder_mead
from .oscillator import (
    OscillatorParams,
    Regime,
    Trajectory,
    classify,
    closed_form,
    resonant_form,
    simulate_rk4,
    steady_state_amplitude,
)
from .periodicity import PeakReport, Periodogram, default_grid, dominant_period, lomb_scargle
from .spatial import ClusterIndex, HeatGrid, build_heat_grid, clark_evans
from .timeseries import (
    ConvergenceEstimate,
    RatingSeries,
    RunningAverage,
    convergence_value,
    rating_series,
    running_average,
    yearly_average,
)
