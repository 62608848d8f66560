"""Power-system case studies: lightning performance, transient stability,
distribution feeders and fault location."""

from ._core import (
    __version__,
    critical_currents,
    fault_knn_curve,
    flashover_rate,
    lightning_study,
    feeder_daily,
    feeder_monte_carlo,
    stability_cct,
    stability_simulate,
    stability_sweep,
)

__all__ = [
    "__version__",
    "critical_currents",
    "fault_knn_curve",
    "flashover_rate",
    "lightning_study",
    "feeder_daily",
    "feeder_monte_carlo",
    "stability_cct",
    "stability_simulate",
    "stability_sweep",
]
