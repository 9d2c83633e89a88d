"""Build script: compiles the optional Cython kernel.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so a missing compiler or Cython
must not fail the install.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speedup extension if possible, warn and continue if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        import warnings

        warnings.warn(
            f"medforest: compiled kernels unavailable ({exc}); "
            "falling back to the pure-Python backend"
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    # -ffp-contract=off: no FMA contraction, so the compiled kernels round
    # exactly like the pure-Python backend.
    ext = Extension(
        "medforest._kernels._speedups",
        ["src/medforest/_kernels/_speedups.pyx"],
        extra_compile_args=["-ffp-contract=off"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
