import os

from setuptools import setup

ext_modules = []
if os.environ.get("WEDGETUG_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "wedgetug._engine",
                    ["src/wedgetug/_engine.pyx"],
                    # -ffp-contract=off keeps the kernel's floating point
                    # identical to the NumPy fallback (no FMA contraction)
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
