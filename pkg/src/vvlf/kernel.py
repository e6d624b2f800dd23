"""The two-variable kernel: pointwise group sums and Fourier coefficients.

Pointwise evaluation enumerates group elements by first column (a, c) with
c >= 0, summing the right T-translates per family and folding the -identity
orbit through U(-I); convergence in |a| is sigma-power, in c it is k-power.

The coefficient formula sums, per coprime pair (a, c) with a, c >= 1, the
matrix gamma+ = (a b; c d) with d the inverse of a mod c and its partner
gamma- = (-a b; c -d):

    r_j(n) = [FOLD ( A + B + C )]_j,      FOLD = I + e^{-i pi k} U(-I)^{-1}

    A_j = delta_ij 1/2 (2 pi)^s Gamma(k-s) (n+kappa_i)^{s-1}
    B_j = 1/2 e^{-i pi k/2} (2 pi)^{k-s} Gamma(s) (n+kappa_j)^{k-s-1} [U(S)^{-1}]_ji
    C_j = 1/2 (2 pi)^k (n+kappa_j)^{k-1} sum_{a,c} c^{-k} (c/a)^s
          { e^{ i pi (s-k)/2} e^{ 2 pi i (n+kappa_j) d/c} [U(gamma+)^{-1}]_ji f1(s,k; -2 pi i (n+kappa_j)/(ac))
          + e^{-i pi (s+k)/2} e^{-2 pi i (n+kappa_j) d/c} [U(gamma-)^{-1}]_ji f1(s,k; +2 pi i (n+kappa_j)/(ac)) }

with f1 the Beta-regularized Kummer function.  The enumeration and the
phases were fixed against the independent numeric Fourier integral
(kernel_coeff_numeric); summing a single d-representative per (c, d) class
instead repeats identical summands and diverges, so the full positive
a-orbit is the convergent reading.  s-derivatives run through truncated
Taylor arrays term by term; no finite differences anywhere.
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _taylor
from .modular_group import GE_I, GE_S, GroupElement
from .special_functions import KummerSeriesEvaluator, gamma, gamma_taylor, kummer_reg

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KernelParams:
    """Evaluation context: action, source component, point s, truncation."""

    action: object
    i: int
    s: complex
    c_max: int = 40
    a_max: int = 0  # 0: choose from c_max
    m_window: int = 48
    n_u: int = 512
    tol: float = 1e-7

    def __post_init__(self):
        k = self.action.weight
        s = complex(self.s)
        if not (1.0 < s.real < k - 1.0):
            raise ValueError(f"s = {s} outside the convergence strip (1, {k - 1})")
        if not 1 <= self.i <= self.action.dim:
            raise ValueError("component i out of range")

    @property
    def weight(self):
        return self.action.weight

    def effective_a_max(self):
        return self.a_max if self.a_max > 0 else self.c_max


@dataclass(frozen=True)
class KernelCoefficient:
    i: int
    j: int
    n: int
    order: int
    value: complex
    truncation_estimate: float
    method: str


def constants(twok, s):
    """(gamma_k(s), c_k) with principal-branch half-integral powers."""
    k = twok / 2.0
    s = complex(s)
    gamma_k = 0.5 * cmath.exp(0.5j * math.pi * s) * gamma(s) * gamma(k - s)
    c_k = cmath.exp(0.5j * math.pi * k) * math.pi * gamma(k - 1.0) / 2.0 ** (k - 2.0)
    return gamma_k, c_k


def _fold_matrix(action):
    """I + e^{-i pi k} U(-I)^{-1}; connects only equal-kappa components."""
    u_minus = action.u_minus_identity()
    phase = cmath.exp(-1j * math.pi * action.twok / 2.0)
    return np.eye(action.dim) + phase * u_minus.conj().T


def _gamma_k_taylor(s, k, order):
    """Taylor array of gamma_k(s+h) = 1/2 e^{i pi (s+h)/2} Gamma(s+h) Gamma(k-s-h)."""
    ph = _taylor.exp_affine(0.5 * cmath.exp(0.5j * math.pi * s), 0.5j * math.pi, order)
    return _taylor.mul_many([ph, gamma_taylor(s, order, 1.0), gamma_taylor(k - s, order, -1.0)])


def _is_trivial(action):
    return (
        action.dim == 1
        and abs(action.image_T[0, 0] - 1.0) < 1e-15
        and abs(action.image_S[0, 0] - 1.0) < 1e-15
    )


def _u_inverse_row(action, g, i):
    """Row vector [U(g)^{-1}]_{., i} for unitary U: conj of U's row i."""
    if _is_trivial(action):
        return np.ones(1, dtype=complex)
    u = action.evaluate(g)
    return u[i - 1, :].conj()


# ----------------------------------------------------------------------
# Pointwise evaluation
# ----------------------------------------------------------------------


def _family_base(a, c):
    """Base matrix (a, b; c, d) with d = a^{-1} mod c, plus that d."""
    if c == 0:
        return GE_I, 0
    d = pow(a % c, -1, c) if c > 1 else 0
    b = (a * d - 1) // c
    return GroupElement(a, b, c, d), d


def _pointwise_stack(params, taus, order):
    """Taylor stacks of the kernel at each tau: shape (order+1, dim, len(taus)).

    Returns (stack, tail_estimate).  The estimate combines the last a-shell
    contributions with the monitored m-window boundary terms.
    """
    action = params.action
    k = params.weight
    s = complex(params.s)
    dim = action.dim
    kap = action.kappa()
    taus = np.asarray(taus, dtype=complex)
    npts = len(taus)
    mw = params.m_window
    a_max = params.effective_a_max()

    kappa_classes = {}
    for j in range(dim):
        kappa_classes.setdefault(round(float(kap[j]), 12), []).append(j)

    facts = np.array([math.factorial(p) for p in range(order + 1)])
    half = np.zeros((order + 1, dim, npts), dtype=complex)
    shell_mag = {}
    edge_mag = 0.0

    def add_family(a, c, weight_vec, window=1):
        nonlocal edge_mag
        g0, d0 = _family_base(a, c)
        if c == 0:
            centers = -taus.real
        else:
            centers = -taus.real - d0 / c
        m_lo = int(np.floor(centers.min())) - mw * window
        m_hi = int(np.ceil(centers.max())) + mw * window
        marr = np.arange(m_lo, m_hi + 1)
        tgrid = taus[None, :] + marr[:, None]
        if c == 0:
            w = np.ones_like(tgrid)
            pts = tgrid
        else:
            w = c * tgrid + d0
            pts = a / c - 1.0 / (c * w)
        logw = np.log(w)
        logp = np.log(pts)
        base = np.exp(-k * logw - s * logp)
        # m-window boundary monitor
        edge_mag += float(np.abs(base[0]).max() + np.abs(base[-1]).max()) * (
            float(np.abs(weight_vec).max())
        )
        contrib = np.empty((order + 1, len(kappa_classes), npts), dtype=complex)
        for ci, kv in enumerate(kappa_classes):
            tw = np.exp(-2j * np.pi * kv * marr)[:, None] if kv else None
            term = base if tw is None else base * tw
            run = term
            for p in range(order + 1):
                contrib[p, ci] = run.sum(axis=0) / facts[p]
                if p < order:
                    run = run * (-logp)
        mag = float(np.abs(contrib[0]).max())
        for ci, (kv, js) in enumerate(kappa_classes.items()):
            for j in js:
                if weight_vec[j] != 0:
                    half[:, j, :] += weight_vec[j] * contrib[:, ci, :]
        return mag

    # c = 0 family (base I, weight e_i), then the a = 0 family {S T^m},
    # whose m-decay is only (k - sigma)-power, hence the widened window.
    e_i = np.zeros(dim, dtype=complex)
    e_i[params.i - 1] = 1.0
    add_family(1, 0, e_i)
    add_family(0, 1, _u_inverse_row(action, GE_S, params.i), window=4)

    for r in range(1, a_max + 1):
        mag_r = 0.0
        for a in (r, -r):
            for c in range(1, params.c_max + 1):
                if math.gcd(r, c) != 1:
                    continue
                g0, _ = _family_base(a, c)
                vec = _u_inverse_row(action, g0, params.i)
                mag_r += abs(add_family(a, c, vec))
        shell_mag[r] = mag_r

    # Empirical power-law tail fit over the last a-shells.
    est = edge_mag * 1e-2
    rs = sorted(shell_mag)
    if len(rs) >= 3 and shell_mag[rs[-1]] > 0 and shell_mag[rs[-3]] > 0:
        r2, r1 = rs[-1], rs[-3]
        p_fit = math.log(shell_mag[r1] / shell_mag[r2]) / math.log(r2 / r1)
        p_fit = max(p_fit, 1.5)
        est += shell_mag[rs[-1]] * rs[-1] / (p_fit - 1.0)
    elif rs:
        est += shell_mag[rs[-1]]

    gk = _gamma_k_taylor(s, k, order)
    fold = _fold_matrix(action)
    stack = np.zeros_like(half)
    for p in range(order + 1):
        acc = np.zeros((dim, npts), dtype=complex)
        for q in range(p + 1):
            acc += gk[q] * half[p - q]
        stack[p] = fold @ acc
    return stack, est * abs(gk[0]) * 2.0


def kernel_pointwise(params, tau):
    """Kernel value vector at tau with a monitored tail estimate."""
    stack, est = _pointwise_stack(params, np.array([complex(tau)]), 0)
    return stack[0, :, 0], est


def kernel_pointwise_taylor(params, tau, order):
    """Taylor stack (order+1, dim) of the kernel in s at a single tau."""
    stack, est = _pointwise_stack(params, np.array([complex(tau)]), order)
    return stack[:, :, 0], est


# ----------------------------------------------------------------------
# Fourier coefficients: explicit formula
# ----------------------------------------------------------------------


def _coprime_pairs_by_shell(r):
    """Coprime (a, c) with a, c >= 1 and max(a, c) = r."""
    pairs = []
    for a in range(1, r + 1):
        if math.gcd(a, r) == 1:
            pairs.append((a, r))
    for c in range(1, r):
        if math.gcd(r, c) == 1:
            pairs.append((r, c))
    return pairs


_KUMMER_SERIES_LIMIT = 20.0


def _kummer_taylor_stack(evaluator, s, k, order, z):
    """Taylor array of 1f1(s+h, k; z): series for small |z|, else quadrature.

    The series loses about |z| log10(e) - 8 digits to cancellation on the
    imaginary axis, so past the cutoff the log-moment quadrature takes over.
    """
    if abs(z) <= _KUMMER_SERIES_LIMIT:
        return evaluator.taylor(z)
    return np.array(
        [kummer_reg(p, s, k, z, tol=1e-12) / math.factorial(p) for p in range(order + 1)],
        dtype=complex,
    )


def kernel_coeff_taylor(params, j, n, order, hard_cap=None):
    """Taylor stack (length order+1) of r_{j}(n) in s, via the formula.

    Shells in max(a, c) accumulate adaptively until the last shell falls
    below 1e-3 of the running tolerance; the cap defaults to the params
    truncation box and a warning reports any estimate above tolerance.
    """
    if hard_cap is None:
        hard_cap = max(params.c_max, params.effective_a_max())
    action = params.action
    k = params.weight
    s = complex(params.s)
    dim = action.dim
    kap = action.kappa()
    if not 1 <= j <= dim:
        raise ValueError("component j out of range")
    njk = n + kap[j - 1]
    nik = n + kap[params.i - 1]
    if njk <= 0:
        raise ValueError("n + kappa_j must be positive")

    u_s_row = _u_inverse_row(action, GE_S, params.i)
    fold = _fold_matrix(action)
    kummer = KummerSeriesEvaluator(s, k, order)

    terms = np.zeros((order + 1, dim), dtype=complex)
    # A: only the i-th component.
    if nik > 0:
        val = 0.5 * cmath.exp(s * math.log(_TWO_PI)) * nik ** (s - 1.0)
        a_ser = _taylor.mul(
            _taylor.exp_affine(val, math.log(_TWO_PI * nik), order),
            gamma_taylor(k - s, order, -1.0),
        )
        terms[:, params.i - 1] += a_ser
    # B and C carry the j-dependent kappa powers; build per component.
    gs = gamma_taylor(s, order, 1.0)
    ph_plus = _taylor.exp_affine(cmath.exp(0.5j * math.pi * (s - k)), 0.5j * math.pi, order)
    ph_minus = _taylor.exp_affine(cmath.exp(-0.5j * math.pi * (s + k)), -0.5j * math.pi, order)

    for jj in range(1, dim + 1):
        x = n + kap[jj - 1]
        if x <= 0:
            continue
        b_val = 0.5 * cmath.exp(-0.5j * math.pi * k) * _TWO_PI ** (k - s) * x ** (k - s - 1.0)
        b_ser = _taylor.mul(_taylor.exp_affine(b_val, -math.log(_TWO_PI * x), order), gs)
        terms[:, jj - 1] += u_s_row[jj - 1] * b_ser

    # C: adaptive shells in max(a, c).
    c_pref = {}
    for jj in range(1, dim + 1):
        x = n + kap[jj - 1]
        if x > 0:
            c_pref[jj] = 0.5 * (_TWO_PI * x) ** k / x
    running = np.zeros((order + 1, dim), dtype=complex)
    shell_history = {}
    small_count = 0
    r = 0
    kummer_cache = {}
    while r < hard_cap:
        r += 1
        shell = np.zeros((order + 1, dim), dtype=complex)
        for a, c in _coprime_pairs_by_shell(r):
            d = pow(a % c, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            g_plus = GroupElement(a, b, c, d)
            g_minus = GroupElement(-a, b, c, -d)
            row_plus = _u_inverse_row(action, g_plus, params.i)
            row_minus = _u_inverse_row(action, g_minus, params.i)
            ck = c ** (-k)
            ca = _taylor.exp_affine((c / a) ** complex(s), math.log(c / a), order)
            for jj in range(1, dim + 1):
                if jj not in c_pref:
                    continue
                if row_plus[jj - 1] == 0 and row_minus[jj - 1] == 0:
                    continue
                x = n + kap[jj - 1]
                zkey = (a * c, round(float(kap[jj - 1]), 12))
                if zkey not in kummer_cache:
                    z = -2j * math.pi * x / (a * c)
                    kummer_cache[zkey] = (
                        _kummer_taylor_stack(kummer, s, k, order, z),
                        _kummer_taylor_stack(kummer, s, k, order, -z),
                    )
                f_plus, f_minus = kummer_cache[zkey]
                e_plus = cmath.exp(2j * math.pi * x * d / c)
                piece = row_plus[jj - 1] * e_plus * _taylor.mul(ph_plus, f_plus)
                piece = piece + row_minus[jj - 1] * e_plus.conjugate() * _taylor.mul(
                    ph_minus, f_minus
                )
                shell[:, jj - 1] += c_pref[jj] * ck * _taylor.mul(ca, piece)
        running += shell
        shell_norm = float(np.abs(shell[0]).max())
        shell_history[r] = shell_norm
        run_norm = float(np.abs(running[0]).max()) + float(np.abs(terms[0]).max())
        if shell_norm < 1e-3 * params.tol * max(run_norm, 1e-300):
            small_count += 1
            if small_count >= 2:
                break
        else:
            small_count = 0

    # Power-law extrapolation of the remaining shells.
    rs = sorted(shell_history)
    est = shell_history[rs[-1]] * rs[-1] if rs else 0.0
    if len(rs) >= 4 and shell_history[rs[-1]] > 0 and shell_history[rs[-4]] > 0:
        p_fit = math.log(shell_history[rs[-4]] / shell_history[rs[-1]]) / math.log(
            rs[-1] / rs[-4]
        )
        p_fit = max(p_fit, 1.5)
        est = shell_history[rs[-1]] * rs[-1] / (p_fit - 1.0)
    run_norm = float(np.abs(running[0]).max()) + float(np.abs(terms[0]).max())
    if est > params.tol * max(run_norm, 1e-300):
        warnings.warn(
            f"kernel_coeff truncation estimate {est:.3e} exceeds tolerance "
            f"{params.tol * run_norm:.3e} at shell cap {hard_cap}",
            RuntimeWarning,
        )

    total = terms + running
    stack = np.zeros(order + 1, dtype=complex)
    for p in range(order + 1):
        stack[p] = (fold @ total[p])[j - 1]
    return stack, est


def kernel_coeff(params, j, n, order=0):
    """r_{k,s,i,j}(n) or its order-th s-derivative via the explicit formula."""
    if order > 3:
        raise ValueError("kernel_coeff supports order <= 3")
    stack, est = kernel_coeff_taylor(params, j, n, order)
    return KernelCoefficient(
        i=params.i,
        j=j,
        n=n,
        order=order,
        value=complex(_taylor.nth_derivative(stack, order)),
        truncation_estimate=est,
        method="formula",
    )


# ----------------------------------------------------------------------
# Fourier coefficients: numeric oracle
# ----------------------------------------------------------------------


def kernel_coeff_numeric(params, j, n, order=0, v0=0.9):
    """Fourier integral oracle: trapezoid of the pointwise kernel over u.

    Independent of the explicit formula; adjudicates its enumeration and
    phase conventions.  s-derivatives differentiate gamma_k(s) tau^{-s}
    term-wise inside the group sum.
    """
    if not 0.5 <= v0 <= 1.5:
        raise ValueError("v0 must lie in [0.5, 1.5]")
    action = params.action
    kapj = action.kappa()[j - 1]
    n_u = params.n_u
    us = np.arange(n_u) / n_u
    taus = us + 1j * v0
    stack, est = _pointwise_stack(params, taus, order)
    phase = np.exp(-2j * np.pi * (n + kapj) * taus)
    coeff = (stack[:, j - 1, :] * phase[None, :]).mean(axis=1)
    return KernelCoefficient(
        i=params.i,
        j=j,
        n=n,
        order=order,
        value=complex(_taylor.nth_derivative(coeff, order)),
        truncation_estimate=est * math.exp(2.0 * math.pi * (n + kapj) * v0),
        method="numeric",
    )
