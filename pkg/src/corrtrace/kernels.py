"""Backend selection for the quadratic-cost response kernel.

The compiled extension is preferred when present; the numpy fallback is
always available.  Set CORRTRACE_KERNEL=cython or =numpy (before import)
to force a backend, or leave it at auto.  `backend_name()` reports the
choice; run manifests record it.
"""

from __future__ import annotations

import os

from . import _response_py

_requested = os.environ.get("CORRTRACE_KERNEL", "auto")
if _requested not in {"auto", "cython", "numpy"}:
    raise ImportError(
        f"CORRTRACE_KERNEL must be 'auto', 'cython' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    _impl = _response_py
    _backend = "numpy"
else:
    try:
        from . import _response_cy as _impl  # type: ignore[no-redef]

        _backend = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "CORRTRACE_KERNEL=cython but the compiled extension is not"
                " importable; reinstall with a C compiler available"
            )
        _impl = _response_py
        _backend = "numpy"

marg_correction = _impl.marg_correction


def backend_name() -> str:
    return _backend
