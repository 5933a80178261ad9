from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize
except ImportError:
    # pure-Python fallback kernels are selected at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "traffic2d._sweep",
                ["src/traffic2d/_sweep.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
