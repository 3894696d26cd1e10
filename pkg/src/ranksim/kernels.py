"""Kernel backend selection.

The compiled extension is preferred when it has been built; otherwise the
pure-NumPy fallback is used.  Set ``RANKSIM_KERNELS=python`` to force the
fallback (handy for debugging and for the backend benchmark), or
``RANKSIM_KERNELS=c`` to fail loudly when the extension is missing.
"""

import os

from ranksim import _pykernels

_requested = os.environ.get("RANKSIM_KERNELS", "").strip().lower()

if _requested not in ("", "c", "python"):
    raise ImportError(
        f"RANKSIM_KERNELS must be 'c' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _pykernels
else:
    try:
        from ranksim import _ckernels as _impl
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "RANKSIM_KERNELS=c but the compiled extension is not built"
            ) from None
        _impl = _pykernels

BACKEND = _impl.NAME

rank_profile = _impl.rank_profile
apsyn = _impl.apsyn
apsynp = _impl.apsynp
cosine = _impl.cosine
pearson = _impl.pearson


def available_backends():
    """Names of the importable backends, preferred first."""
    names = []
    try:
        from ranksim import _ckernels  # noqa: F401

        names.append("c")
    except ImportError:
        pass
    names.append("python")
    return names
