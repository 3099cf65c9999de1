"""Blind spectral unmixing of land-cover abundances from multispectral time series."""

from ._core import (
    Dataset,
    Model,
    StunmixError,
    __version__,
    aggregate,
    block_split,
    evaluate,
    gradcheck,
    load_dataset,
    load_model,
    metrics,
    parse_dataset,
    run_cli,
    synth,
    train,
)

__all__ = [
    "Dataset",
    "Model",
    "StunmixError",
    "__version__",
    "aggregate",
    "block_split",
    "evaluate",
    "gradcheck",
    "load_dataset",
    "load_model",
    "metrics",
    "parse_dataset",
    "run_cli",
    "synth",
    "train",
]
