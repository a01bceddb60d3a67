"""Build script: compiles the optional Cython speedup extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any compiler or Cython failure downgrades to a
pure-Python install instead of aborting.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: compiled speedup extension not built ({exc}); "
            "falling back to the pure-Python kernels",
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [Extension("modtag._dotcore", ["src/modtag/_dotcore.pyx"])],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
