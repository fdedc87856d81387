"""Build script for the optional compiled condition-check kernel.

The package is fully functional without the extension; byztrim._kernels
falls back to the pure-Python implementation when the compiled module is
missing (or when BYZTRIM_PURE=1 is set).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/byztrim/_kernels/native.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
