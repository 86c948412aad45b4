"""CMake-driven build of the _stereoct extension module."""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                str(source),
                f"-DPython3_EXECUTABLE={sys.executable}",
                "-DSTEREOCT_BUILD_PYTHON=ON",
                "-DSTEREOCT_BUILD_TOOLS=OFF",
                "-DSTEREOCT_BUILD_TESTS=OFF",
                "-DCMAKE_BUILD_TYPE=Release",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_stereoct"], cwd=build_dir, check=True
        )

        # The CMake target drops the module under python/stereoct/ in the
        # build tree; copy it to wherever setuptools wants this extension.
        built = sorted((build_dir / "python" / "stereoct").glob("_stereoct.*"))
        if not built:
            raise RuntimeError("CMake did not produce the _stereoct module")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[-1], dest)


setup(
    ext_modules=[CMakeExtension("stereoct._stereoct")],
    cmdclass={"build_ext": CMakeBuild},
)
