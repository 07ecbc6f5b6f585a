"""Build script: compiles the optional hull/PAVA kernels.

The package is fully functional without the extension (a pure-Python twin is
selected at import time), so build failures here downgrade to a warning
instead of failing the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"skipping compiled kernels ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; pure-Python fallback will be used")
        return []
    return cythonize(
        [
            Extension(
                "isorate._kernels._hullc",
                ["src/isorate/_kernels/_hullc.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
