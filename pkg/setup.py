"""Build script for the optional compiled search kernel.

The package is fully functional without the extension: rainbowlab.kernels
falls back to the pure-Python kernel when the compiled module is missing.
Any build failure therefore downgrades to a warning instead of aborting
the install.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("rainbowlab: Cython not available, skipping compiled kernel", file=sys.stderr)
        return []
    from setuptools import Extension

    ext = Extension(
        "rainbowlab._fastkernel",
        sources=["src/rainbowlab/_fastkernel.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Treat extension build failures as non-fatal."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure downgrades
            print(f"rainbowlab: compiled kernel build failed ({exc}); "
                  "falling back to the pure-Python kernel", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"rainbowlab: building {ext.name} failed ({exc}); "
                  "falling back to the pure-Python kernel", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
