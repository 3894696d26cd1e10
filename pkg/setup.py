"""Build script for the compiled metric kernels.

The extension is optional: when Cython (or a C compiler) is unavailable the
package installs anyway and falls back to the pure-NumPy kernels at import
time.  Set RANKSIM_NO_EXT=1 to skip the extension build explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RANKSIM_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "ranksim._ckernels",
                    ["src/ranksim/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
