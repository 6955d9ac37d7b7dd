"""Build script: compiles the Cython kernel core when Cython is available.

A plain ``pip install`` without Cython (or with ROVELLA_NO_EXT=1) produces a
pure-Python install; the package falls back to the NumPy kernels at import.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ROVELLA_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rovellalab._kernels._core",
                    ["src/rovellalab/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
