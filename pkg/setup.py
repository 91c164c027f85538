"""Build script for the optional compiled evaluation kernel.

The package works without the extension (a pure-numpy kernel is selected at
import time); set FDSCHED_NO_EXT=1 to skip compilation explicitly.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("FDSCHED_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        print("fdsched: Cython not available, building without compiled kernel")
        return []
    ext = Extension(
        "fdsched._kernels",
        ["src/fdsched/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())
