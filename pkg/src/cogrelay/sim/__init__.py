from .backend import DEFAULT as DEFAULT_BACKEND, KERNELS
from .protocol import NetworkState, SlotTrace, step
from .runner import SimReport, run, run_dominated

__all__ = ["DEFAULT_BACKEND", "KERNELS", "NetworkState", "SimReport", "SlotTrace", "run", "run_dominated", "step"]
