"""Python surface of the particle transport core.

Everything is re-exported from the compiled module: kernel and KDE
primitives, the SVGD transport loop, calibration metrics, and the
end-to-end experiment runner driven by config key/value pairs.
"""

from dsvgd._core import (
    annealed_rate,
    grid_kl,
    kde_log_density,
    kde_score,
    median_bandwidth,
    rbf_kernel,
    rbf_kernel_matrix,
    reliability_and_mce,
    run_experiment,
    run_toy_demo,
    svgd_direction,
    svgd_run,
)

__all__ = [
    "annealed_rate",
    "grid_kl",
    "kde_log_density",
    "kde_score",
    "median_bandwidth",
    "rbf_kernel",
    "rbf_kernel_matrix",
    "reliability_and_mce",
    "run_experiment",
    "run_toy_demo",
    "svgd_direction",
    "svgd_run",
]
