"""Backend selection for the hot tree kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``MRBT_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the pure-Python twin is used. ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

_force_python = os.environ.get("MRBT_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_python:
        raise ImportError("pure Python backend requested")
    from . import _ckernels as _active
    BACKEND = "cython"
except ImportError:
    _active = _pykernels
    BACKEND = "python"

in_range = _active.in_range
locate = _active.locate
descend = _active.descend
update_masses = _active.update_masses
locate_many = _active.locate_many
sample_into = _active.sample_into
cdf_scan = _active.cdf_scan


def available_backends():
    """Map backend name to kernel module, for benchmarks and cross-checks."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
