"""Build script: compiles the hot-kernel extension when Cython is available.

Set SOAR_SIM_NO_EXT=1 to skip the extension entirely; the package then runs
on the pure-Python kernel selected at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SOAR_SIM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "soar_sim._kernel.fast",
                    ["src/soar_sim/_kernel/fast.pyx"],
                    # -ffp-contract=off: no FMA contraction. -fno-builtin: stops
                    # GCC fusing sin+cos into glibc sincos, which differs from
                    # separate sin/cos by 1 ulp on rare arguments. Both keep the
                    # compiled kernel bit-identical to the pure-Python one.
                    extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
