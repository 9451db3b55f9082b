"""Build script for the optional compiled response kernels.

The package works without the extension (a pure-numpy fallback is selected at
import time), so a missing compiler is not fatal: build the sdist/wheel with
whatever is available and let `corrtrace.kernels` pick the backend.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "corrtrace._response_cy",
                ["src/corrtrace/_response_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
