"""Hot kernels: compiled Cython core with a pure-Python fallback.

The compiled module is used when importable; set ``BBPLACE_PURE_PYTHON=1``
to force the fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def get_backend(name=None):
    """Return the kernel module ``"cython"``, ``"python"`` or the default."""
    if name is None:
        return _default
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def available():
    return ["python"] + (["cython"] if _ckernels is not None else [])


if _ckernels is not None and not os.environ.get("BBPLACE_PURE_PYTHON"):
    _default = _ckernels
else:
    _default = _pykernels

BACKEND = _default.NAME
net_hpwl = _default.net_hpwl
total_hpwl = _default.total_hpwl
weighted_lcs = _default.weighted_lcs
mgo_decode = _default.mgo_decode
