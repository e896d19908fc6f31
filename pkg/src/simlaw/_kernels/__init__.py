"""Training-kernel backend selection.

The compiled Cython core is preferred when its extension module built;
otherwise the numpy implementation is used. Set SIMLAW_BACKEND=numpy or
SIMLAW_BACKEND=cython to force one. Both expose the same two functions
(forward, loss_and_grads) and are individually deterministic.
"""

import os

from . import _numpy

try:
    from . import _core
except ImportError:
    _core = None


def available_backends():
    names = ["numpy"]
    if _core is not None:
        names.insert(0, "cython")
    return tuple(names)


def get_backend(name):
    if name == "numpy":
        return _numpy
    if name == "cython":
        if _core is None:
            raise ImportError(
                "the compiled kernel extension is not available; rebuild the "
                "package or use SIMLAW_BACKEND=numpy"
            )
        return _core
    raise ValueError(f"unknown backend {name!r}")


_requested = os.environ.get("SIMLAW_BACKEND")
if _requested:
    _active = get_backend(_requested)
else:
    _active = _core if _core is not None else _numpy

BACKEND = _active.NAME
forward = _active.forward
loss_and_grads = _active.loss_and_grads
