from setuptools import setup

import hardylab

setup(
    name="hardylab",
    version=hardylab.__version__,
    description="Numerical laboratory for sharp and quantitative fractional "
    "Hardy inequalities.",
    long_description=open("README.rst").read(),
    license="BSD",
    packages=["hardylab"],
    include_package_data=True,
    zip_safe=False,
    python_requires=">=3.8",
    install_requires=["Django>=3.2", "numpy>=1.21", "scipy>=1.8"],
    entry_points={"console_scripts": ["hardylab = hardylab.cli:main"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Framework :: Django",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
