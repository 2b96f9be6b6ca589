"""Build script: compiles the optional Cython kernel.

The package works without the compiled extension (a NumPy fallback is
selected at import time), so a failed extension build only degrades
throughput of the sequence-detection kernels, never correctness.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "gearphy.kernels._forward",
        sources=["src/gearphy/kernels/_forward.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"gearphy: skipping compiled kernel ({exc}); NumPy fallback will be used")

setup(ext_modules=ext_modules)
