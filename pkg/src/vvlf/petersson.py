"""Petersson inner products over the standard fundamental domain.

The domain {|u| <= 1/2, |tau| >= 1} is split into the rectangle v in
[1, V_max] (geometric v-panels, tensor Gauss nodes) and the cap below v = 1,
whose circular lower boundary sqrt(1 - u^2) is treated exactly per u-node.
The reported error combines a coarse/fine comparison with the analytic tail
above V_max.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._quad import _rule


@dataclass(frozen=True)
class QuadratureSpec:
    v_max: float = 8.0
    n_u: int = 48
    n_v: int = 24
    tol: float = 1e-10

    def __post_init__(self):
        if self.v_max < 2.0:
            raise ValueError("V_max must be >= 2")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")

    def halved(self):
        return QuadratureSpec(self.v_max, max(8, self.n_u // 2), max(6, self.n_v // 2), self.tol)


@dataclass(frozen=True)
class InnerProduct:
    value: complex
    error: float


def _check_compatible(f, g):
    if f.action.twok != g.action.twok or f.dim != g.dim:
        raise ValueError("inner product requires equal weight and dimension")
    if (
        np.abs(f.action.image_T - g.action.image_T).max() > 1e-12
        or np.abs(f.action.image_S - g.action.image_S).max() > 1e-12
    ):
        raise ValueError("inner product requires a common action")
    if not (f.cusp and g.cusp):
        raise ValueError("inner product requires cusp forms")


def _eval_grid(f, taus):
    """Values of f on a flat array of points, shape (dim, len(taus))."""
    kap = f.kappa()
    out = np.zeros((f.dim, len(taus)), dtype=complex)
    for j, comp in enumerate(f.coeffs):
        if not comp:
            continue
        ns = np.array(sorted(comp)) + kap[j]
        vals = np.array([complex(comp[n]) for n in sorted(comp)])
        out[j] = np.exp(2j * np.pi * np.outer(ns, taus)).T @ vals
    return out


def _domain_nodes(spec):
    """Quadrature nodes/weights covering the fundamental domain up to V_max."""
    xu, wu = _rule(spec.n_u)
    u = 0.5 * xu
    wu = 0.5 * wu
    xv, wv = _rule(spec.n_v)
    taus = []
    weights = []
    # cap: v from sqrt(1-u^2) to 1, per u node
    for ui, wui in zip(u, wu):
        lo = math.sqrt(1.0 - ui * ui)
        half = 0.5 * (1.0 - lo)
        mid = 0.5 * (1.0 + lo)
        for xvi, wvi in zip(xv, wv):
            taus.append(ui + 1j * (mid + half * xvi))
            weights.append(wui * wvi * half)
    # rectangle: geometric panels [1,2], [2,4], ... up to V_max
    edges = [1.0]
    while edges[-1] < spec.v_max:
        edges.append(min(2.0 * edges[-1], spec.v_max))
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for ui, wui in zip(u, wu):
            for xvi, wvi in zip(xv, wv):
                taus.append(ui + 1j * (mid + half * xvi))
                weights.append(wui * wvi * half)
    return np.array(taus), np.array(weights)


def _integrate(f, g, spec):
    taus, weights = _domain_nodes(spec)
    fv = _eval_grid(f, taus)
    gv = _eval_grid(g, taus)
    integrand = (fv * gv.conj()).sum(axis=0)
    v = taus.imag
    k = f.weight
    return complex(np.dot(weights, integrand * v ** (k - 2.0)))


def _tail_above(f, g, spec):
    """Bound on the integral over v > V_max from coefficient decay.

    With |a(n)| <= C (n+kappa)^q, q = k/2 + 1, the n >= 2 terms contribute a
    bounded multiplier to the leading e^{-2 pi (min exponent) v} decay, and
    the v-integral is v^{k-2} against that exponential.
    """
    cf, cg = f.growth_constant(), g.growth_constant()
    if cf == 0 or cg == 0:
        return 0.0
    kf = min(min(f.exponents(j + 1)) for j in range(f.dim) if f.coeffs[j])
    kg = min(min(g.exponents(j + 1)) for j in range(g.dim) if g.coeffs[j])
    alpha = 2.0 * math.pi * (kf + kg)
    k = f.weight
    q = k / 2.0 + 1.0
    v0 = spec.v_max
    damp = math.exp(-2.0 * math.pi * v0)
    geo = (1.5 ** q) * damp
    if geo >= 0.5 or alpha * v0 <= 2.0 * max(1.0, k - 2.0):
        return math.inf
    mult = (1.0 + (2.0 ** q) * damp / (1.0 - geo)) ** 2
    integral = v0 ** (k - 2.0) * math.exp(-alpha * v0) / alpha
    integral /= 1.0 - (k - 2.0) / (alpha * v0)
    return cf * cg * f.dim * mult * integral


def inner_product(f, g, spec=None):
    """(f, g) = int_F <f, g> v^k du dv / v^2 with an error estimate."""
    if spec is None:
        spec = QuadratureSpec()
    _check_compatible(f, g)
    fine = _integrate(f, g, spec)
    coarse = _integrate(f, g, spec.halved())
    err = abs(fine - coarse) + _tail_above(f, g, spec)
    return InnerProduct(value=fine, error=err)
