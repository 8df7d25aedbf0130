"""Build script for the optional compiled row-reduction kernel.

The package is pure Python; if Cython and a C compiler are available the
exact row-reduction core is compiled for speed, otherwise the identical
pure-Python implementation is used (selected at import in
``extremenu.kernels``).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("extremenu._rowred_c", ["src/extremenu/_rowred_c.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
