"""Builds the optional compiled pooling kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so the build is best-effort: no Cython or no compiler means
a plain install.
"""

from setuptools import Extension, setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "embeval.kernels._pool",
                ["src/embeval/kernels/_pool.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
