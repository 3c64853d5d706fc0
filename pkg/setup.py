"""Build script: compiles the Cython kernel extension.

The package still works without the extension (the pure-Python twin in
knotlab._kernels_py is selected at import time), so a failed compile is
not fatal for development; run `python setup.py build_ext --inplace` or a
normal pip install to get the fast kernels.
"""

from setuptools import setup
from setuptools.extension import Extension

import numpy

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "knotlab._kernels",
        ["src/knotlab/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3) if cythonize else [],
)
