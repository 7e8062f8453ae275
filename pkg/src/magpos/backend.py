"""Kernel backend selection.

The compiled extension is used when importable; otherwise the
pure-Python fallback. ``MAGPOS_BACKEND`` overrides: ``python`` forces
the fallback, ``compiled`` fails loudly if the extension is missing,
``auto`` (default) prefers compiled.
"""

from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("MAGPOS_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "compiled"):
    raise RuntimeError(f"MAGPOS_BACKEND must be auto|python|compiled, got {_requested!r}")

if _requested == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError("MAGPOS_BACKEND=compiled but magpos._kernels is not built")
        _impl = _fallback
        BACKEND = "python"

choose_fork_paper = _impl.choose_fork_paper
relax_sweep = _impl.relax_sweep
