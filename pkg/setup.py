#!/usr/bin/env python3
"""
Setup script for the MPR gap-filling package.
"""

from setuptools import setup, find_packages

setup(
    name="mpr_gapfill",
    version="1.0.0",
    description="Fill gaps in gridded data with conditional simulations of the modified planar rotator model",
    author="Your Name",
    author_email="your.email@example.com",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy",
        "scipy",
        "scikit-learn",
        "Pillow",
        "python-dotenv",
        "colorama",
        "psutil",
        "tqdm",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        "console_scripts": [
            "mpr-gapfill=mpr_gapfill.cli:main",
        ],
    },
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering",
    ],
)
