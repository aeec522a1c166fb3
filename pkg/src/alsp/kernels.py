"""Backend selection for the pooling scan kernel.

The compiled Cython extension is preferred; a pure-numpy fallback keeps the
package fully functional when the extension was not built.  Set ALSP_PURE_PY=1
to force the fallback (useful for the backend-comparison benchmark and for
debugging).
"""

from __future__ import annotations

import os

from . import _pool_py

_FORCED_PURE = bool(os.environ.get("ALSP_PURE_PY"))

try:
    from . import _pool as _compiled
except ImportError:  # extension not built on this install
    _compiled = None

if _compiled is not None and not _FORCED_PURE:
    pool_boundaries = _compiled.pool_boundaries
    BACKEND = "compiled"
else:
    pool_boundaries = _pool_py.pool_boundaries
    BACKEND = "python"


def available_backends() -> dict:
    """Name -> pool_boundaries callable, for every importable backend."""
    out = {"python": _pool_py.pool_boundaries}
    if _compiled is not None:
        out["compiled"] = _compiled.pool_boundaries
    return out
