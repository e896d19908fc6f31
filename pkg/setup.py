import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "simlaw._kernels._core",
                ["src/simlaw/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    # Pure-python install; simlaw._kernels falls back to the numpy backend.
    ext_modules = []

setup(ext_modules=ext_modules)
