"""Build the optional Cython extension for the hot quadrature kernels.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes the nonlinearity evaluation faster.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/gsqglab/_kernels.pyx",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
