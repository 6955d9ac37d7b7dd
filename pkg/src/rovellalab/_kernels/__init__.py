"""Kernel selection: compiled Cython core when built, NumPy fallback otherwise.

``ROVELLA_PURE_PYTHON=1`` in the environment forces the fallback even when
the extension is installed; the benchmark and the cross-implementation tests
rely on that switch.  ``IMPL`` names the active implementation.
"""

import os

if os.environ.get("ROVELLA_PURE_PYTHON") == "1":
    from . import fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import fallback as _impl

from .fallback import EDGE, KIND_F0, KIND_G0, KIND_PERTURBED, KIND_TENT

IMPL = _impl.IMPL_NAME

orbit_array = _impl.orbit_array
orbit_factors = _impl.orbit_factors
step_many = _impl.step_many
deriv_many = _impl.deriv_many
cocycle_sums = _impl.cocycle_sums
first_visit = _impl.first_visit
basin_entry = _impl.basin_entry
neglog_sums = _impl.neglog_sums

__all__ = [
    "IMPL",
    "EDGE",
    "KIND_G0",
    "KIND_F0",
    "KIND_TENT",
    "KIND_PERTURBED",
    "orbit_array",
    "orbit_factors",
    "step_many",
    "deriv_many",
    "cocycle_sums",
    "first_visit",
    "basin_entry",
    "neglog_sums",
]
