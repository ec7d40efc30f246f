#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import setup, find_packages

with open('README.md') as readme_file:
    readme = readme_file.read()

requirements = ['numpy>=1.22', 'scipy>=1.12', ]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest', 'hypothesis', 'sympy', ]

setup(
    author="Tyler Jarvis",
    author_email='jarvis@math.byu.edu',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],
    description="Shooting, endpoint extrapolation and verification of axially symmetric Helfrich spheres.",
    install_requires=requirements,
    license="MIT license",
    long_description=readme + '\n\n',
    include_package_data=True,
    keywords='HelfrichSpheres',
    name='HelfrichSpheres',
    packages=find_packages(include=['hspheres']),
    entry_points={'console_scripts': ['hspheres=hspheres.cli:main']},
    python_requires='>=3.9',
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    version='0.1.0',
    zip_safe=False,
)
