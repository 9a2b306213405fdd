"""Optional Cython build of the Dyson-sum kernel.

If Cython or a C compiler is missing the package still installs and the
numpy fallback is used.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("qutrit_otto._kernels", ["src/qutrit_otto/_kernels.pyx"], optional=True)],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
