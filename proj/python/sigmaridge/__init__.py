"""Ridge projection estimators of the squared diffusion coefficient."""

from ._core import (
    Error,
    Estimator,
    __version__,
    calibrate,
    fit,
    gram_diagnostics,
    mise,
    nw,
    scott_bandwidth,
    select,
    sigma_sq,
    simulate,
    table,
    table_ids,
)

__all__ = [
    "Error",
    "Estimator",
    "__version__",
    "calibrate",
    "fit",
    "gram_diagnostics",
    "mise",
    "nw",
    "scott_bandwidth",
    "select",
    "sigma_sq",
    "simulate",
    "table",
    "table_ids",
]
