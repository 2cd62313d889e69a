"""Higher-order moment scaling of return series.

Windowed standardised moments, two-regime log-log scaling fits, a
GARCH-double-normal(1,1) simulator, historical VaR curves and a two-exponent
Pareto tail model predicting the scaling exponents.
"""

__version__ = "0.1.0"

from .errors import MomScaleError  # noqa: E402
from .series import (  # noqa: E402
    PriceSeries,
    ReturnSeries,
    Window,
    WindowPlan,
    build_windows,
    load_prices,
    load_returns,
    load_series,
    log_returns,
)
from .moments import (  # noqa: E402
    MomentRecord,
    central_moment,
    gaussian_moment,
    gaussian_ratio,
    mean,
    moment_profile,
    standardized_moment,
)
from .scaling import LogLogPoint, ScalingLine, TwoRegimeFit, fit_line, fit_two_regimes, loglog_points  # noqa: E402
from .garch import GarchSpec, MixtureSpec, mixture_variance, sample_mixture, simulate  # noqa: E402
from .var import VarCurve, VarPoint, historical_var, var_curve  # noqa: E402
from .tail import (  # noqa: E402
    TailSpec,
    gamma_curve,
    normalize,
    predicted_exponents,
    sample_tail,
    solve_xw,
    tail_prob,
    truncated_moment,
)

__all__ = [
    "MomScaleError",
    "PriceSeries", "ReturnSeries", "Window", "WindowPlan", "build_windows",
    "load_prices", "load_returns", "load_series", "log_returns",
    "MomentRecord", "central_moment", "gaussian_moment", "gaussian_ratio", "mean",
    "moment_profile", "standardized_moment",
    "LogLogPoint", "ScalingLine", "TwoRegimeFit", "fit_line", "fit_two_regimes", "loglog_points",
    "GarchSpec", "MixtureSpec", "mixture_variance", "sample_mixture", "simulate",
    "VarCurve", "VarPoint", "historical_var", "var_curve",
    "TailSpec", "gamma_curve", "normalize", "predicted_exponents", "sample_tail",
    "solve_xw", "tail_prob", "truncated_moment",
]
