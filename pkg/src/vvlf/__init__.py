"""Numerical machinery for vector-valued modular form L-functions.

Modules
-------
special_functions   gamma / polygamma / tail integrals / Kummer functions
modular_group       SL2(Z) words, metaplectic lifts, unitary actions
forms               Fourier expansions, Jacobi tables, theta decomposition
lfunction           completed L-functions and s-derivatives
kernel              the two-variable kernel and its Fourier coefficients
petersson           Petersson inner products on the fundamental domain
experiments         identity verification, non-vanishing scans, diagnostics
cli                 command-line front end
"""

__version__ = "0.1.0"
