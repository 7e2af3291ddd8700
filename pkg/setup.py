"""Build the optional Cython kernel.

The package works without it; ``abmarket._kernels`` falls back to the
numpy implementation when the extension is missing.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ABMARKET_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "abmarket._kernels._core",
                    ["src/abmarket/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    # no FMA contraction: results must match the numpy fallback bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
