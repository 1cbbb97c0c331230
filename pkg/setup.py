import numpy as np
from setuptools import Extension, setup

# The compiled kernel core is optional: the package falls back to the
# vectorized numpy backend when the extension is missing. -ffp-contract=off
# keeps the C code from fusing multiplies/adds so both backends produce
# bit-identical floats.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "emberfield.kernels._core",
                ["src/emberfield/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
