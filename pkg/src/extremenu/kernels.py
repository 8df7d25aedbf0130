"""Backend selection for the exact row-reduction kernel.

The compiled extension is preferred when it was built; the pure-Python
implementation is the fallback and the reference. Set EXTREMENU_PURE_PYTHON=1
to force the fallback (used by the benchmark and the parity tests).
"""

import os

if os.environ.get("EXTREMENU_PURE_PYTHON"):
    from . import _rowred_py as _impl
else:
    try:
        from . import _rowred_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _rowred_py as _impl

BACKEND = _impl.BACKEND
rref_sparse = _impl.rref_sparse
