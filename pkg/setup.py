"""Build script: compiles the Cython pooling kernel when Cython is available.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a missing Cython toolchain only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "alsp._pool",
                ["src/alsp/_pool.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
