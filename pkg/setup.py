#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import setup, find_packages

with open('README.md') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = ['Click>=7.0',
                'numpy>=1.17',
                'scipy>=1.6',
                'lmfit>=1.0',
                'matplotlib>=3.1',
                'tqdm',
                ]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest', 'hypothesis', ]

setup(
    author="S.P. Mohanty",
    author_email='mohanty@aicrowd.com',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    description="Scattering spectra of tunable qubit arrays "
                "coupled to a waveguide",
    entry_points={
        'console_scripts': [
            'waveguide-metamaterial=waveguide_metamaterial.cli:main',
        ],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme,
    long_description_content_type='text/markdown',
    include_package_data=True,
    keywords='waveguide_metamaterial',
    name='waveguide_metamaterial',
    packages=find_packages(include=['waveguide_metamaterial',
                                    'waveguide_metamaterial.*']),
    package_data={'waveguide_metamaterial': ['data/*.json']},
    python_requires='>=3.8',
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    url='https://github.com/spMohanty/waveguide_metamaterial',
    version='0.1.0',
    zip_safe=False,
)
