from .client import EnvClient, LayoutMismatch
from .plots import SchemaError, make_plots
from .train import TrainConfig, TrainResult, train

__all__ = [
    "EnvClient",
    "LayoutMismatch",
    "SchemaError",
    "TrainConfig",
    "TrainResult",
    "make_plots",
    "train",
]
__version__ = "0.1.0"
