"""Build the optional compiled kernels.

The package works without them (pure-Python fallback is selected at
import time), so a failed extension build is downgraded to a warning.
"""

import sys

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "magpos._kernels",
                ["src/magpos/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # -fno-builtin: stop gcc fusing sin/cos pairs into sincos,
                # which can differ by 1 ulp from the separate libm calls the
                # pure-Python fallback makes; backends must match bit for bit
                extra_compile_args=["-O3", "-fno-builtin"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"magpos: skipping compiled kernels ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
