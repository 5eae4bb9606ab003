from setuptools import setup

setup(
    name='pytreestates',
    version='0.1.0',
    packages=['tests', 'pytreestates'],
    license='MIT',
    author='',
    author_email='',
    description='Quantum state trees, multilinear formulas, coset-state tree size and rank experiments.',
    long_description='Construct, parse, evaluate and transform quantum state trees and multilinear arithmetic '
                     'formulas; compute manifestly orthogonal tree size of coset states; compile orthogonal '
                     'trees to state-preparation circuits; run the rank experiments behind tree-size lower bounds.',
    install_requires=[
        'numpy',
    ],
    python_requires='>=3.9',
    entry_points={
        'console_scripts': ['pytreestates = pytreestates.cli:main'],
    },
    classifiers=[
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 3 - Alpha',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
    ],
    package_data={
        'pytreestates': ['fixtures/*.tree', 'fixtures/*.mat'],
    }
)
