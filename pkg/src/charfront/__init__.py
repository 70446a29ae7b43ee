"""Front-tracking solver and stability audit suite for steady supersonic flow
over a static gas, formulated in stream coordinates with the wall condition
p = p_bar on the lower boundary."""

from .config import GasConstants, RunConfig, Tolerances, load_run_config
from .gas import FlowState, reference_state

__version__ = "0.1.0"

__all__ = [
    "FlowState",
    "GasConstants",
    "RunConfig",
    "Tolerances",
    "load_run_config",
    "reference_state",
    "__version__",
]
