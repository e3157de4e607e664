"""Build hook: compile the Cython kernels when possible, fall back otherwise.

The package is fully functional without the extension (qlev.backend selects
the pure-Python kernels at import time), so any failure here is non-fatal.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("qlev._kernels", ["src/qlev/_kernels.pyx"])],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    print(f"qlev: skipping compiled kernels ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=extensions)
