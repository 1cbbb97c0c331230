"""Hot-kernel backend selection.

The compiled Cython core is preferred when its extension module built; the
vectorized numpy backend is the fallback. Both produce bit-identical output
(enforced by tests/test_kernels_parity.py), so the choice only affects
speed. Override with EMBERFIELD_KERNELS=python|compiled|auto.
"""

import os

from . import _backend_py

_mode = os.environ.get("EMBERFIELD_KERNELS", "auto")
if _mode not in ("auto", "compiled", "python"):
    raise RuntimeError(f"EMBERFIELD_KERNELS must be auto|compiled|python, got {_mode!r}")

if _mode == "python":
    impl = _backend_py
    HAVE_COMPILED = False
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]
        HAVE_COMPILED = True
    except ImportError:
        if _mode == "compiled":
            raise
        impl = _backend_py
        HAVE_COMPILED = False

BACKEND = impl.BACKEND

hash_u01 = impl.hash_u01
emitter_math = impl.emitter_math
nearest_select = impl.nearest_select
tree_sample = impl.tree_sample
grass_sample = impl.grass_sample
raymarch_depth = impl.raymarch_depth

CH_TREE_JITTER_X = _backend_py.CH_TREE_JITTER_X
CH_TREE_JITTER_Y = _backend_py.CH_TREE_JITTER_Y
CH_TREE_YAW = _backend_py.CH_TREE_YAW
CH_TREE_MULT = _backend_py.CH_TREE_MULT
CH_TREE_VAR = _backend_py.CH_TREE_VAR
CH_TREE_MODEL = _backend_py.CH_TREE_MODEL
CH_GRASS_JITTER_X = _backend_py.CH_GRASS_JITTER_X
CH_GRASS_JITTER_Y = _backend_py.CH_GRASS_JITTER_Y
CH_GRASS_YAW = _backend_py.CH_GRASS_YAW


def available_backends():
    names = ["python"]
    if backend_module("compiled") is not None:
        names.append("compiled")
    return names


def backend_module(name):
    """Return a backend module by name, or None if it is not importable."""
    if name == "python":
        return _backend_py
    if name == "compiled":
        try:
            from . import _core
            return _core
        except ImportError:
            return None
    if name == "auto":
        return impl
    raise ValueError(f"unknown backend {name!r}")
