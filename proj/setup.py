import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = [
    "src/environment.cpp",
    "src/generators.cpp",
    "src/serialize.cpp",
    "src/walk.cpp",
    "src/models.cpp",
    "src/entropy.cpp",
    "src/harmonic.cpp",
    "src/heatkernel.cpp",
    "src/bindings.cpp",
]

eigen = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "rwre._core",
    sources,
    include_dirs=["include", eigen],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
