import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

eigen = os.environ.get("EIGEN_INCLUDE_DIR", "/usr/include/eigen3")

core_sources = [
    "src/aposteriori.cpp",
    "src/link_predict.cpp",
    "src/metrics.cpp",
    "src/net_data.cpp",
    "src/num.cpp",
    "src/state_space.cpp",
    "src/static_sbm.cpp",
    "src/synth_gen.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "dynsbm._core",
            sources=["python/bindings.cpp"] + core_sources,
            include_dirs=["include", eigen],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
