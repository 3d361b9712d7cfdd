"""Build hook for the optional compiled tracker kernel.

The package works without it: ``polarhecke.monodromy.kernel`` falls back to
the numpy implementation when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("POLARHECKE_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "polarhecke.monodromy._tracker_core",
                    ["src/polarhecke/monodromy/_tracker_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
