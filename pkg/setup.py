import os

from setuptools import setup

ext_modules = []
if os.environ.get("SAFESTAB_NO_EXT", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("safestab._kernels", ["src/safestab/_kernels.pyx"],
                       include_dirs=[numpy.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
