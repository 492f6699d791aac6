#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_namespace_packages

with open("README.md") as readme_file:
    readme = readme_file.read()

requirements = [
    "numpy>=2.0",
    "scipy",
    "matplotlib",
    "click>=8.0",
    "lark>=1.1",
]

setup(
    author="hefcheck developers",
    python_requires=">=3.10",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
        "Programming Language :: Python :: 3 :: Only",
    ],
    description="Head-cycle and head-elementary-set freeness checks for disjunctive logic programs",
    install_requires=requirements,
    license="MIT License",
    long_description=readme,
    include_package_data=True,
    package_data={"hefcheck": ["data/*.lp", "data/*.cnf"]},
    keywords=["logic programming", "answer set programming", "elementary sets"],
    name="hefcheck",
    packages=find_namespace_packages(
        include=["hefcheck"],
    ),
    entry_points={"console_scripts": ["hefcheck=hefcheck.cli:main"]},
    version="v0.0.1",
    zip_safe=False,
    long_description_content_type="text/markdown",
)
