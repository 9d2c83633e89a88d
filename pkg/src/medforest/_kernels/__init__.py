"""Kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the
pure-Python fallback. Set MEDFOREST_PURE_PYTHON=1 to force the
fallback (used by tests and the benchmark to compare backends).
Both backends produce bit-identical floats by construction.
"""

import os

if os.environ.get("MEDFOREST_PURE_PYTHON", "") not in ("", "0"):
    from medforest._kernels import purepy as _impl
else:
    try:
        from medforest._kernels import _speedups as _impl  # type: ignore
    except ImportError:
        from medforest._kernels import purepy as _impl

BACKEND: str = _impl.BACKEND
Workspace = _impl.Workspace


def make_workspace(n, q, d, eu, ev, ew):
    """Build an evaluation workspace on the active backend."""
    return Workspace(n, q, d, eu, ev, ew)
