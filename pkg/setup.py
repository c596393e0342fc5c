import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FINTXN_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("fintxn.kernels._hot", ["src/fintxn/kernels/_hot.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install with the pure-Python kernels only.
        ext_modules = []

setup(ext_modules=ext_modules)
