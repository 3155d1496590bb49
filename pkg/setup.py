from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "qogyro._leaf_ext",
        ["src/qogyro/_leaf_ext.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
