"""Build script for the compiled kernel extension.

The extension is optional: when Cython is unavailable the package still
installs and falls back to the pure-python kernels at import time.
-ffp-contract=off keeps the compiled float kernels bit-identical to the
numpy fallback (no fused multiply-add).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "gatepilot._kernels._native",
                sources=["src/gatepilot/_kernels/_native.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
else:
    extensions = []

setup(ext_modules=extensions)
