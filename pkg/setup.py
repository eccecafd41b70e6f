"""Build the optional compiled diff kernel.

The package works without it; promptkey.diffing falls back to the pure-Python
kernel when the extension is missing or fails to build.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the whole install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled diff kernel ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc})")


PYX = "src/promptkey/diffing/_myers.pyx"

try:
    import os

    from Cython.Build import cythonize

    if os.path.exists(PYX):
        extensions = cythonize(
            [Extension("promptkey.diffing._myers", [PYX])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    else:
        extensions = []
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
