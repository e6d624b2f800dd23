"""Completed vector-valued L-functions and their s-derivatives.

The integral over (0, inf) is split at 1 and the lower piece unfolded by the
S-transformation, giving the everywhere-convergent representation

    L*(f, s) = I(f, s) + i^k U(S) I(f, k - s),
    I(f, s)  = sum_j e_j sum_n a_j(n) tail_integral(s, 2 pi (n + kappa_j), 0),

entire in s.  Derivatives replace the tail factor with its log-moment
versions, with (-1)^order on the reflected piece.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .special_functions import tail_integral

_MAX_ORDER = 5


@dataclass(frozen=True)
class CompletedLValue:
    s: complex
    order: int
    value: np.ndarray
    tail_bound: float

    def __post_init__(self):
        if not np.isfinite(self.value).all():
            raise ValueError("non-finite L-value")
        if self.tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")


def _half_series(f, s, order, tol):
    """I(f, s) with the log_order-th tail factor, plus a truncation bound."""
    kap = f.kappa()
    out = np.zeros(f.dim, dtype=complex)
    for j, comp in enumerate(f.coeffs):
        acc = 0.0 + 0.0j
        for n, val in sorted(comp.items()):
            x = 2.0 * math.pi * (n + kap[j])
            acc += complex(val) * tail_integral(s, x, order, tol=tol)
        out[j] = acc
    # Tail past n_max: |a| <= C (n+kappa)^p and |TI| <= 2 e^{-x}/x for x >= 2 max(1, q).
    c = f.growth_constant()
    p = f.weight / 2.0 + 1.0
    sigma = complex(s).real
    bound = 0.0
    if c > 0:
        nstart = f.n_max + 1.0
        x0 = 2.0 * math.pi * nstart
        if x0 > 2.0 * max(1.0, sigma + order):
            ratio = math.exp(-2.0 * math.pi) * ((nstart + 1.0) / nstart) ** p
            first = c * nstart ** p * 2.0 * math.exp(-x0) / x0
            bound = f.dim * first / (1.0 - ratio)
        else:
            bound = math.inf
    return out, bound


def completed_L(f, s, order=0, tol=1e-14):
    """L*(f, s) or its order-th s-derivative as a CompletedLValue."""
    if not f.cusp:
        raise ValueError("completed_L requires a cusp form")
    if not 0 <= order <= _MAX_ORDER:
        raise ValueError(f"order must be in [0, {_MAX_ORDER}]")
    s = complex(s)
    k = f.weight
    i_direct, b1 = _half_series(f, s, order, tol)
    i_reflect, b2 = _half_series(f, k - s, order, tol)
    phase = cmath.exp(1j * math.pi * f.action.twok / 4.0)  # i^k, principal
    value = i_direct + ((-1.0) ** order) * phase * (f.action.image_S @ i_reflect)
    return CompletedLValue(s=s, order=order, value=value, tail_bound=b1 + b2)


def functional_equation_residual(f, s):
    """|| L*(f,s) - i^k U(S) L*(f,k-s) || / || L*(f,s) ||."""
    s = complex(s)
    k = f.weight
    lhs = completed_L(f, s).value
    rhs = completed_L(f, k - s).value
    phase = cmath.exp(1j * math.pi * f.action.twok / 4.0)
    diff = lhs - phase * (f.action.image_S @ rhs)
    return float(np.linalg.norm(diff) / max(np.linalg.norm(lhs), 1e-300))


def partial_L(f, j, s, order=0, normalization="fractional"):
    """Component-j Dirichlet series of the stored expansion.

    ``fractional`` sums a_j(nu) (nu + kappa_j)^{-s}, matching the index-m
    partial L-functions with denominators (n/4m)^s.  ``integer`` rescales
    the terms to (4m (nu + kappa_j))^{-s} with 4m = 2 * dim, matching the
    plus-space normalization n^{-s}; the two differ by the factor (4m)^{-s}.
    Direct truncated summation of stored coefficients (no continuation).
    """
    if not 1 <= j <= f.dim:
        raise ValueError(f"component {j} out of range 1..{f.dim}")
    s = complex(s)
    kap = f.kappa()[j - 1]
    if normalization == "fractional":
        scale = 1.0
    elif normalization == "integer":
        scale = 2.0 * f.dim
    else:
        raise ValueError("normalization must be 'fractional' or 'integer'")
    acc = 0.0 + 0.0j
    for n, val in sorted(f.coeffs[j - 1].items()):
        x = (n + kap) * scale
        if x <= 0:
            continue
        term = complex(val) * cmath.exp(-s * math.log(x))
        if order:
            term *= (-math.log(x)) ** order
        acc += term
    return acc


def plus_partial_L(pf, j, s, order=0):
    """Partial sums over n = -j^2 mod 4 of the plus-space expansion."""
    if j not in (1, 2):
        raise ValueError("plus-space component must be 1 or 2")
    s = complex(s)
    acc = 0.0 + 0.0j
    for n, val in sorted(pf.coeffs.items()):
        if n <= 0 or n % 4 != (-(j * j)) % 4:
            continue
        term = complex(val) * cmath.exp(-s * math.log(n))
        if order:
            term *= (-math.log(n)) ** order
        acc += term
    return acc
