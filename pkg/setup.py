"""Build script: compiles the optional simplex pivot kernel.

The package is fully functional without the compiled extension (a numpy
fallback is selected at import time), so any build failure here downgrades
to a pure-Python install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fedenvelope.solver._simplex_c",
                ["src/fedenvelope/solver/_simplex_c.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"fedenvelope: skipping compiled kernel ({exc!r})", file=sys.stderr)

setup(ext_modules=ext_modules)
