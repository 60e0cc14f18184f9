"""Build script: compiles the optional metric-kernel extension.

The package works without the extension (a pure-Python twin of the kernel is
selected at import time), so a failed compile only costs speed.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/txpopt/_speedups.pyx",
        language_level=3,
    )
    # -ffp-contract=off: no FMA contraction, so the compiled kernel stays
    # bit-identical to the pure-Python fallback.
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
except ImportError:
    print("Cython not available; installing with the pure-Python kernel only.", file=sys.stderr)

setup(ext_modules=ext_modules)
