"""PPG to blood-pressure ARX reconstruction (Python bindings)."""

from ._ppgbp import (
    ArxModel,
    Error,
    aggregate,
    detect_peaks,
    detect_troughs,
    downsample,
    evaluate,
    fit_arx,
    generate,
    mbp,
    report_table,
    search_orders,
    simulate,
    spline_on_grid,
)

__all__ = [
    "ArxModel",
    "Error",
    "aggregate",
    "detect_peaks",
    "detect_troughs",
    "downsample",
    "evaluate",
    "fit_arx",
    "generate",
    "mbp",
    "report_table",
    "search_orders",
    "simulate",
    "spline_on_grid",
]
