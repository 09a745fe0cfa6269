"""Build script.

The compiled kernel (nshyp._core._native) is optional: if Cython or a C
compiler is unavailable the build falls back to a pure-Python install and
the package selects the slower backend at import time.  Set NSHYP_NO_EXT=1
to skip the extension build explicitly, or NSHYP_REQUIRE_EXT=1 to make a
failed extension build fatal.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except (CCompilerError, ExecError, PlatformError, FileNotFoundError) as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, FileNotFoundError) as exc:
            self._skip(exc)

    def _skip(self, exc):
        if os.environ.get("NSHYP_REQUIRE_EXT") == "1":
            raise
        print(f"warning: skipping nshyp._core._native build ({exc}); "
              "the pure-Python backend will be used")


ext_modules = []
cmdclass = {}
if os.environ.get("NSHYP_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/nshyp/_core/_native.pyx"],
            compiler_directives={"language_level": "3"},
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        if os.environ.get("NSHYP_REQUIRE_EXT") == "1":
            raise
        print("warning: Cython not available; building without the native kernel")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
