"""Backend selection: compiled kernels when available, pure Python otherwise.

Set ``QLEV_PURE_PYTHON=1`` in the environment to force the reference
implementation even when the extension module is importable (used by the
twin-path agreement tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("QLEV_PURE_PYTHON") == "1":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

IS_COMPILED: bool = bool(getattr(kernels, "IS_COMPILED", False))

__all__ = ["kernels", "IS_COMPILED"]
