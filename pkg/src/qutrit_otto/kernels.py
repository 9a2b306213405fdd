"""Select the compiled Dyson-sum kernel, falling back to numpy.

Set ``OTTO_QUTRIT_PURE=1`` to force the numpy implementation.
"""

import os

from . import _kernels_py

KIND_CODES = _kernels_py.KIND_CODES

if os.environ.get("OTTO_QUTRIT_PURE", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

HAVE_COMPILED = _compiled is not None
BACKEND = "cython" if HAVE_COMPILED else "numpy"


def dyson_sums(taus, cw, jx, rho0, kind_code, param, eps, backend=None):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled.dyson_sums(taus, cw, jx, rho0, kind_code, param, eps)
    return _kernels_py.dyson_sums(taus, cw, jx, rho0, kind_code, param, eps)


def dyson_sums_matrix(wmat, cw, jx, rho0):
    return _kernels_py.dyson_sums_matrix(wmat, cw, jx, rho0)
