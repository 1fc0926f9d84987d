from ._schedrate import (
    ConfigError,
    NumericError,
    Problem,
    ResourceError,
    __version__,
    berry_esseen_error_bound,
    berry_esseen_prediction,
    canonical_config,
    cost_exact,
    discard_probability,
    normal_cdf,
    normal_quantile,
    r_n_plus,
    run,
    schedule,
    sum_distribution,
)
