"""Kernel selection: the compiled loop when it was built, the Python loop otherwise.

Set ``COGRELAY_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from .protocol import run_block_py

try:
    from ._kernel import run_block as run_block_c
except ImportError:  # extension not built
    run_block_c = None

KERNELS = {"python": run_block_py}
if run_block_c is not None:
    KERNELS["cython"] = run_block_c

DEFAULT = "cython" if run_block_c is not None and os.environ.get("COGRELAY_BACKEND") != "python" else "python"


def get_kernel(name: str | None = None):
    name = name or DEFAULT
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(KERNELS)}") from None
