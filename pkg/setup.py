import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bessctl._kernels._compiled",
                ["src/bessctl/_kernels/_compiled.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback kernels are used when the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
