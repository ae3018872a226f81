"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when it was built; otherwise the
numpy implementations in ``_kernels_py`` are used.  Both give identical
results, so the choice only affects speed.
"""

from . import _kernels_py

try:
    from . import _kernels as _native
except ImportError:  # extension not built
    _native = None

BACKENDS = {"python": _kernels_py}
if _native is not None:
    BACKENDS["native"] = _native

_default = "native" if _native is not None else "python"


def available():
    return tuple(BACKENDS)


def get(name=None):
    """Return the kernel module called ``name`` (default: the active backend)."""
    key = _default if name is None else name
    try:
        return BACKENDS[key]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {key!r}; have {available()}") from None


def set_default(name):
    global _default
    get(name)
    _default = name


def default_name():
    return _default
