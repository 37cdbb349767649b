"""
PrivAR Privacy Pipeline

Setup configuration for the PrivAR package.
"""

from setuptools import setup, find_packages
from os import path

# Read the contents of README.md
this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

# Read requirements.txt
with open(path.join(this_directory, 'requirements.txt'), encoding='utf-8') as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith('#')]

setup(
    name='privar',
    version='1.0.0',
    description='Three-tier privacy pipeline for AR frames: edge text obfuscation and cloud VLM risk assessment',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='PrivAR Team',

    # Package structure
    packages=find_packages(include=['src', 'src.*']),

    # Dependencies
    python_requires='>=3.9',
    install_requires=requirements,

    # Optional dependencies
    extras_require={
        'dev': [
            'pytest>=7.4.0',
            'pytest-cov>=4.1.0',
            'pytest-mock>=3.11.1',
            'pytest-timeout>=2.1.0',
            'hypothesis>=6.82.6',
            'black>=23.7.0',
            'flake8>=6.0.0',
            'mypy>=1.4.1',
            'isort>=5.12.0',
        ],
    },

    # Entry points for command-line scripts
    entry_points={
        'console_scripts': [
            'privar=src.cli.main:main',
        ],
    },

    # Package metadata
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Image Processing',
        'Topic :: Security',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Operating System :: POSIX :: Linux',
        'Operating System :: MacOS :: MacOS X',
        'Framework :: FastAPI',
        'Framework :: Pytest',
        'Natural Language :: English',
    ],

    # Additional package data
    include_package_data=True,
    package_data={
        'src': [
            '../config/*.yml',
            '../config/*.json',
        ],
    },

    keywords=[
        'augmented-reality',
        'privacy',
        'text-obfuscation',
        'vision-language-model',
        'edge-computing',
        'chain-of-thought',
    ],

    # Zip safe flag
    zip_safe=False,

    # Platform specification
    platforms=['Linux', 'MacOS X'],
)
