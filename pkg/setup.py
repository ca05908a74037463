from setuptools import setup, Extension

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel is an optimization only; the package falls back to a
# numpy implementation when the extension is unavailable.
ext = Extension(
    "curvedecay._frkernel",
    ["src/curvedecay/_frkernel.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level="3") if cythonize else [])
