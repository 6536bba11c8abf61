"""Backend selection for the ANOVA kernels.

The compiled extension is preferred; if it was not built the numpy
implementation is used. ``BACKEND`` names the active one.
"""

from . import _kernels_py

try:
    from . import _ckernels as _active
except ImportError:  # extension not built
    _active = _kernels_py

BACKEND = _active.BACKEND
anova_ss = _active.anova_ss
anova_ss_batch = _active.anova_ss_batch


def available_backends():
    """Mapping of backend name to kernel module, compiled first if present."""
    found = {}
    if _active is not _kernels_py:
        found[_active.BACKEND] = _active
    found[_kernels_py.BACKEND] = _kernels_py
    return found


def get_backend(name):
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
