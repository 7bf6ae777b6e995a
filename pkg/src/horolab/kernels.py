"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``HOROLAB_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names the active one.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("HOROLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend or python_backend

BACKEND = _active.BACKEND
fd_reduce_batch = _active.fd_reduce_batch
incomplete_eisenstein_reduced = _active.incomplete_eisenstein_reduced
pair_gather_sum = _active.pair_gather_sum
lattice_model_sum = _active.lattice_model_sum
kloosterman_batch = _active.kloosterman_batch
classify_range = _active.classify_range

CASE_I, CASE_II, CASE_III, CASE_IV = 1, 2, 4, 8


def available_backends():
    return [b for b in (compiled_backend, python_backend) if b is not None]
