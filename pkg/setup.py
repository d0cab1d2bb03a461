from setuptools import setup, find_packages

setup(
    name='jacsearch',
    version='0.1.0',
    description='jacsearch: Searching hyperelliptic curve families for Jacobians of B-easy order',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.10',
    install_requires=[
        'pandas',
        'numpy',
        'scipy',
        'statsmodels',
        'sympy',
        'gmpy2',
        'mpmath'
    ],
    entry_points={
        'console_scripts': [
            'jacsearch=jacsearch.cli:main'
        ]
    },
)
