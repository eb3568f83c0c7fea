import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: if Cython or a C compiler is missing,
# the package installs anyway and falls back to sdgscore.kernels.pure.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "sdgscore.kernels._speedups",
                ["src/sdgscore/kernels/_speedups.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
