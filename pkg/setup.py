"""Build script: compiles the optional Cython core.

The extension is a performance twin of ``gpbounds._core._purepy``; if Cython
or a C compiler is unavailable (or GPBOUNDS_NO_EXT=1 is set) the package
installs pure-Python and selects the fallback at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GPBOUNDS_NO_EXT", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gpbounds._core._corex",
                    ["src/gpbounds/_core/_corex.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
