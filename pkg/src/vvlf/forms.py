"""Fourier-expansion data model, built-in scalar forms, Jacobi tables.

Coefficients are stored per component as {n: value} with value an exact
python int when integral and a complex double otherwise; the text format
preserves that distinction so integer data round-trips bit-faithfully.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .modular_group import UnitaryAction, scalar_trivial, weil_action

DEFAULT_V_MIN = 0.05


class CoefficientFileError(ValueError):
    """Malformed coefficient file; message carries the line number."""


# ----------------------------------------------------------------------
# Vector-valued Fourier expansions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FourierExpansion:
    """An m-component q-expansion attached to a unitary action.

    Component j (0-based internally) holds a_j(n) for integers n with
    n + kappa_j > 0; the exponent of component j at index n is n + kappa_j.
    """

    action: UnitaryAction
    coeffs: tuple  # tuple of dicts {n: int|complex}
    n_max: int
    label: str = ""
    cusp: bool = True

    def __post_init__(self):
        if len(self.coeffs) != self.action.dim:
            raise ValueError("component count does not match action dimension")
        if not self.cusp:
            return
        kap = self.action.kappa()
        for j, comp in enumerate(self.coeffs):
            for n, val in comp.items():
                if n + kap[j] <= 0 and val != 0:
                    raise ValueError(
                        f"cusp-form support violated: component {j + 1}, n={n}, "
                        f"kappa={kap[j]:.6g}"
                    )

    @property
    def dim(self):
        return self.action.dim

    @property
    def weight(self):
        return self.action.weight

    def kappa(self):
        return self.action.kappa()

    def coefficient(self, j, n):
        """a_j(n) with 1-based component index j."""
        return self.coeffs[j - 1].get(n, 0)

    def exponents(self, j):
        """Sorted exponents n + kappa_j of component j (1-based)."""
        kap = self.kappa()[j - 1]
        return sorted(n + kap for n in self.coeffs[j - 1])

    def growth_constant(self):
        """Fitted C with |a_j(n)| <= C (n + kappa_j)^(k/2 + 1)."""
        p = self.weight / 2.0 + 1.0
        c = 0.0
        for j, comp in enumerate(self.coeffs):
            kap = self.kappa()[j]
            for n, val in comp.items():
                x = n + kap
                if x > 0:
                    c = max(c, abs(val) / x ** p)
        return c

    def evaluate(self, tau, v_min=DEFAULT_V_MIN):
        """Value vector at tau plus a tail bound past n_max."""
        tau = complex(tau)
        v = tau.imag
        if v < v_min:
            raise ValueError(f"Im(tau) = {v} below v_min = {v_min}")
        kap = self.kappa()
        out = np.zeros(self.dim, dtype=complex)
        for j, comp in enumerate(self.coeffs):
            acc = 0.0 + 0.0j
            for n, val in comp.items():
                acc += complex(val) * cmath.exp(2j * math.pi * (n + kap[j]) * tau)
            out[j] = acc
        err = self._tail_bound(v)
        return out, err

    def _tail_bound(self, v):
        c = self.growth_constant()
        if c == 0.0:
            return 0.0
        p = self.weight / 2.0 + 1.0
        x = self.n_max + 1.0
        ratio = math.exp(-2.0 * math.pi * v) * ((x + 1.0) / x) ** p
        if ratio >= 0.97:
            return math.inf
        first = c * x ** p * math.exp(-2.0 * math.pi * v * x)
        return self.dim * first / (1.0 - ratio)

    def scaled(self, factor):
        new = tuple({n: factor * complex(v) for n, v in comp.items()} for comp in self.coeffs)
        return FourierExpansion(self.action, new, self.n_max, label=self.label + "-scaled")


def linear_combination(terms):
    """sum alpha_i * f_i for expansions sharing one action."""
    action = terms[0][1].action
    dim = action.dim
    out = [dict() for _ in range(dim)]
    n_max = 0
    for alpha, f in terms:
        if f.action is not action and (
            f.action.twok != action.twok
            or np.abs(f.action.image_T - action.image_T).max() > 1e-12
            or np.abs(f.action.image_S - action.image_S).max() > 1e-12
        ):
            raise ValueError("linear combination requires a common action")
        n_max = max(n_max, f.n_max)
        for j in range(dim):
            for n, v in f.coeffs[j].items():
                out[j][n] = out[j].get(n, 0) + alpha * complex(v)
    return FourierExpansion(action, tuple(out), n_max, label="lincomb")


# ----------------------------------------------------------------------
# Built-in scalar cusp forms (exact integer expansions)
# ----------------------------------------------------------------------


def _mul_trunc(a, b, n_max):
    out = [0] * (n_max + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > n_max:
            continue
        top = min(len(b), n_max - i + 1)
        for j in range(top):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


def _eta_product_series(n_max):
    """prod_{n>=1} (1 - q^n) via the pentagonal number theorem."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    m = 1
    while True:
        p1 = m * (3 * m - 1) // 2
        p2 = m * (3 * m + 1) // 2
        if p1 > n_max and p2 > n_max:
            break
        if p1 <= n_max:
            coeffs[p1] += (-1) ** m
        if p2 <= n_max:
            coeffs[p2] += (-1) ** m
        m += 1
    return coeffs


def delta_coefficients(n_max):
    """Ramanujan tau(n) for 1 <= n <= n_max, exact integers."""
    p = _eta_product_series(n_max)
    p8 = _mul_trunc(_mul_trunc(p, p, n_max), _mul_trunc(p, p, n_max), n_max)
    p8 = _mul_trunc(p8, _mul_trunc(p, p, n_max), n_max)
    p8 = _mul_trunc(p8, _mul_trunc(p, p, n_max), n_max)  # p^8
    p24 = _mul_trunc(_mul_trunc(p8, p8, n_max), p8, n_max)
    return {n + 1: p24[n] for n in range(min(n_max, len(p24))) if n + 1 <= n_max}


def _sigma(n, power):
    return sum(d ** power for d in range(1, n + 1) if n % d == 0)


def eisenstein_coefficients(k, n_max):
    """E_4 or E_6 as an exact integer list indexed from q^0."""
    if k == 4:
        return [1] + [240 * _sigma(n, 3) for n in range(1, n_max + 1)]
    if k == 6:
        return [1] + [-504 * _sigma(n, 5) for n in range(1, n_max + 1)]
    raise ValueError("only E4 and E6 are built in")


_SCALAR_FACTORS = {12: (), 16: (4,), 18: (6,), 20: (4, 4), 22: (4, 6), 26: (4, 4, 6)}


def delta_expansion(n_max=40):
    tau = delta_coefficients(n_max)
    return FourierExpansion(
        scalar_trivial(12), ({n: v for n, v in tau.items()},), n_max, label="delta"
    )


def scalar_basis(k, n_max=None):
    """The normalized one-dimensional cusp form at level one.

    Available at k in {12, 16, 18, 20, 22, 26}; coefficients are exact
    integers from Delta times Eisenstein factors, first coefficient 1.
    """
    if k not in _SCALAR_FACTORS:
        raise ValueError(f"k={k} is not a one-dimensional weight")
    if n_max is None:
        n_max = k + 28
    tau = delta_coefficients(n_max)
    series = [0] * (n_max + 1)
    for n, v in tau.items():
        series[n] = v
    for ek in _SCALAR_FACTORS[k]:
        series = _mul_trunc(series, eisenstein_coefficients(ek, n_max), n_max)
    coeffs = {n: series[n] for n in range(1, n_max + 1)}
    return FourierExpansion(scalar_trivial(k), (coeffs,), n_max, label=f"f{k}")


# ----------------------------------------------------------------------
# Theta series and Jacobi coefficient tables
# ----------------------------------------------------------------------


def theta_series_coeffs(m, j, n_max):
    """Multiplicities of q^{n/(4m)} in theta_{m,j}: {n = r^2: #matching r}."""
    if not 1 <= j <= 2 * m:
        raise ValueError("need 1 <= j <= 2m")
    out = {}
    r = j
    while r * r <= n_max:
        out[r * r] = out.get(r * r, 0) + 1
        r += 2 * m
    r = j - 2 * m
    while r * r <= n_max:
        out[r * r] = out.get(r * r, 0) + 1
        r -= 2 * m
    return dict(sorted(out.items()))


def _canonical_r(r, m):
    return ((r + m - 1) % (2 * m)) - m + 1


def _component_of_r(r, m):
    return ((r - 1) % (2 * m)) + 1


def _rho_offset(j, m):
    """(-j^2) mod 4m: numerator of kappa_j over 4m."""
    return (-(j * j)) % (4 * m)


@dataclass(frozen=True)
class JacobiCoefficients:
    """Table a(l, r) of a Jacobi cusp form of even weight k and index m.

    Keys are canonicalized to r in (-m, m]; lookups for arbitrary (l, r)
    reduce through the dependence on (4ml - r^2, r mod 2m).
    """

    k: int
    m: int
    table: dict
    d_max: int

    def __post_init__(self):
        if self.k % 2 != 0:
            raise ValueError("Jacobi weight must be even")
        canon = {}
        for (l, r), val in self.table.items():
            d = 4 * self.m * l - r * r
            if d <= 0:
                if val != 0:
                    raise ValueError(f"cusp condition violated at (l={l}, r={r})")
                continue
            rc = _canonical_r(r, self.m)
            lc = (d + rc * rc) // (4 * self.m)
            key = (lc, rc)
            if key in canon and canon[key] != val:
                raise ValueError(
                    f"inconsistent table: ({l},{r}) vs canonical {key} "
                    f"({val} != {canon[key]})"
                )
            canon[key] = val
        object.__setattr__(self, "table", canon)

    def get(self, l, r):
        d = 4 * self.m * l - r * r
        if d <= 0:
            return 0
        rc = _canonical_r(r, self.m)
        lc = (d + rc * rc) // (4 * self.m)
        return self.table.get((lc, rc), 0)

    def missing_keys(self):
        """Canonical (l, r) with 0 < 4ml - r^2 <= d_max absent from the table."""
        missing = []
        for r in range(-self.m + 1, self.m + 1):
            l = 1
            while 4 * self.m * l - r * r <= self.d_max:
                if 4 * self.m * l - r * r > 0 and (l, r) not in self.table:
                    missing.append((l, r))
                l += 1
        return missing

    def check_invariant(self, extended_keys):
        """a(l,r) must agree across keys sharing (4ml - r^2, r mod 2m)."""
        for (l, r), val in extended_keys.items():
            if self.get(l, r) != val:
                return (l, r)
        return None


def theta_decompose(jac):
    """Components F_j of the theta expansion as a vector-valued form.

    Component j carries a((n + j^2)/4m, j) at exponent n/(4m), i.e. at
    integer index nu = (n - rho_j)/4m with kappa_j = rho_j/(4m).
    """
    missing = jac.missing_keys()
    if missing:
        raise ValueError(f"incomplete Jacobi table, missing (l, r): {missing[:8]}")
    m = jac.m
    comps = [dict() for _ in range(2 * m)]
    for (l, r), val in jac.table.items():
        d = 4 * m * l - r * r
        j = _component_of_r(r, m)
        nu = (d - _rho_offset(j, m)) // (4 * m)
        comps[j - 1][nu] = val
    n_max = max((max(c) for c in comps if c), default=0)
    action = weil_action(m, jac.k)
    return FourierExpansion(action, tuple(comps), n_max, label=f"jacobi-k{jac.k}-m{m}")


def jacobi_reconstruct(f, m):
    """Inverse of theta_decompose on its image (exact)."""
    if f.dim != 2 * m:
        raise ValueError("component count must be 2m")
    table = {}
    d_max = 0
    k = int(round(f.weight + 0.5))
    for j0, comp in enumerate(f.coeffs):
        j = j0 + 1
        rc = _canonical_r(j, m)
        for nu, val in comp.items():
            d = 4 * m * nu + _rho_offset(j, m)
            l = (d + rc * rc) // (4 * m)
            table[(l, rc)] = val
            d_max = max(d_max, d)
    return JacobiCoefficients(k=k, m=m, table=table, d_max=d_max)


def theta_vector_expansion(m, n_max_disc):
    """The weight-1/2 theta vector (z = 0 specialization), conjugate action."""
    w = weil_action(m, 2)  # placeholder weight, images reused below
    action = UnitaryAction(
        label=f"theta-m{m}",
        twok=1,
        image_T=w.image_T.conj(),
        image_S=w.image_S.conj(),
    )
    comps = []
    for j in range(1, 2 * m + 1):
        table = theta_series_coeffs(m, j, n_max_disc)
        rho = (j * j) % (4 * m)  # conjugate action: kappa_j = +j^2/4m mod 1
        comp = {}
        for n, mult in table.items():
            comp[(n - rho) // (4 * m)] = mult
        comps.append(comp)
    n_max = max((max(c) for c in comps if c), default=0)
    return FourierExpansion(action, tuple(comps), n_max, label=f"theta-m{m}", cusp=False)


# ----------------------------------------------------------------------
# Kohnen plus-space map (index 1)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PlusForm:
    """Scalar expansion sum_j F_j(4 tau); coefficients live on n = 0,3 mod 4."""

    twok: int
    coeffs: dict
    label: str = ""

    def component_of(self, n):
        """Inverse indexing: (j, nu) with c(n) = a_j(nu)."""
        if n % 4 == 3:
            return 1, (n - 3) // 4
        if n % 4 == 0:
            return 2, n // 4
        raise ValueError(f"n = {n} is outside the plus space support")

    def c_part(self, j, n):
        """c_j(n): c(n) when n = -j^2 mod 4, else 0."""
        if n % 4 == (-(j * j)) % 4:
            return self.coeffs.get(n, 0)
        return 0


def plus_space_map(f):
    """phi(F) = F_1(4 tau) + F_2(4 tau) for the index-1 decomposition."""
    if f.dim != 2:
        raise ValueError("plus-space map requires exactly 2 components")
    out = {}
    for j0, comp in enumerate(f.coeffs):
        j = j0 + 1
        rho = _rho_offset(j, 1)
        for nu, val in comp.items():
            n = 4 * nu + rho
            out[n] = out.get(n, 0) + val
    for n in out:
        if n % 4 not in (0, 3):
            raise AssertionError("plus-space support violated")
    return PlusForm(twok=f.action.twok, coeffs=dict(sorted(out.items())), label=f.label + "-plus")


# ----------------------------------------------------------------------
# Slash residuals
# ----------------------------------------------------------------------


def automorphy_power(g, tau, twok):
    """(c tau + d)^{-k} on the principal branch (exact for integral k)."""
    w = g.automorphy(tau)
    if twok % 2 == 0:
        return w ** (-(twok // 2))
    return cmath.exp(-(twok / 2.0) * cmath.log(w))


def default_slash_samples(g):
    """Sample points with both Im(tau) and Im(g tau) of order 1/|c|.

    For c != 0, tau = -d/c + x + i/|c| puts g tau at height about
    1/(|c| (1 + x^2 c^2 / c^2)); the caller's truncation n_max must resolve
    heights ~ 1/(2|c|).
    """
    if g.c == 0:
        return (0.13 + 1.04j, -0.31 + 0.92j, 0.42 + 1.61j)
    c = abs(g.c)
    base = -g.d / g.c
    return tuple(base + x / c + 1j / c for x in (0.23, -0.31, 0.52))


def slash_residual(f, g, tau_samples=None, v_min=None):
    """max_tau ||(f|g)(tau) - f(tau)|| / scale over usable samples."""
    if tau_samples is None:
        tau_samples = default_slash_samples(g)
    if v_min is None:
        v_min = min(DEFAULT_V_MIN, 0.4 / max(abs(g.c), 1))
    u = f.action.evaluate(g)
    u_inv = u.conj().T
    worst = 0.0
    scale = 0.0
    pairs = []
    for tau in tau_samples:
        gt = g.apply(tau)
        if gt.imag < v_min or complex(tau).imag < v_min:
            continue
        fv, _ = f.evaluate(tau, v_min=v_min)
        fgt, _ = f.evaluate(gt, v_min=v_min)
        slashed = automorphy_power(g, tau, f.action.twok) * (u_inv @ fgt)
        pairs.append((slashed, fv))
        scale = max(scale, float(np.linalg.norm(fv)))
    if not pairs:
        raise ValueError("no usable tau samples above v_min")
    for slashed, fv in pairs:
        worst = max(worst, float(np.linalg.norm(slashed - fv)))
    return worst / max(scale, 1e-300)


# ----------------------------------------------------------------------
# Text formats
# ----------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, int):
        return str(x)
    if isinstance(x, complex):
        raise TypeError("format complex as two fields")
    if float(x) == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_value(val):
    if isinstance(val, int):
        return f"{val} 0"
    z = complex(val)
    re = int(z.real) if z.real == int(z.real) and abs(z.real) < 1e15 else z.real
    im = int(z.imag) if z.imag == int(z.imag) and abs(z.imag) < 1e15 else z.imag
    return f"{_fmt(re)} {_fmt(im)}"


def _parse_number(tok):
    if "." in tok or "e" in tok or "E" in tok or "inf" in tok or "nan" in tok:
        return float(tok)
    return int(tok)


def save_expansion(f, path):
    lines = [
        "# vvf",
        f"# twok = {f.action.twok}",
        f"# m = {f.dim}",
        f"# label = {f.label}",
        f"# nmax = {f.n_max}",
    ]
    kap = f.kappa()
    for j in range(f.dim):
        lines.append(f"# kappa {j + 1} {_fmt(float(kap[j]))}")
    for name, mat in (("T", f.action.image_T), ("S", f.action.image_S)):
        for j in range(f.dim):
            row = " ".join(
                f"{_fmt(float(mat[j, l].real))} {_fmt(float(mat[j, l].imag))}"
                for l in range(f.dim)
            )
            lines.append(f"# action {name} row {j + 1} {row}")
    for j in range(f.dim):
        for n in sorted(f.coeffs[j]):
            val = f.coeffs[j][n]
            if isinstance(val, complex) or val != 0:
                lines.append(f"{j + 1} {n} {_fmt_value(val)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_expansion(path):
    twok = None
    m = None
    label = ""
    n_max = None
    kappa = {}
    rows = {"T": {}, "S": {}}
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                if line.startswith("#"):
                    body = line[1:].strip()
                    if body == "vvf":
                        continue
                    if "=" in body:
                        key, _, val = body.partition("=")
                        key = key.strip()
                        val = val.strip()
                        if key == "twok":
                            twok = int(val)
                        elif key == "m":
                            m = int(val)
                        elif key == "label":
                            label = val
                        elif key == "nmax":
                            n_max = int(val)
                        continue
                    parts = body.split()
                    if parts[0] == "kappa":
                        kappa[int(parts[1])] = float(parts[2])
                    elif parts[0] == "action":
                        name, j = parts[1], int(parts[3])
                        vals = [float(x) for x in parts[4:]]
                        rows[name][j] = [
                            complex(vals[2 * i], vals[2 * i + 1]) for i in range(len(vals) // 2)
                        ]
                    continue
                parts = line.split()
                if len(parts) != 4:
                    raise ValueError("expected 'j n re im'")
                j, n = int(parts[0]), int(parts[1])
                re, im = _parse_number(parts[2]), _parse_number(parts[3])
                records.append((j, n, re, im))
            except (ValueError, IndexError) as exc:
                raise CoefficientFileError(f"{path}:{lineno}: {exc}") from exc
    if twok is None or m is None:
        raise CoefficientFileError(f"{path}: missing twok/m header")
    image_t = np.array([rows["T"][j + 1] for j in range(m)])
    image_s = np.array([rows["S"][j + 1] for j in range(m)])
    action = UnitaryAction(label=label or "loaded", twok=twok, image_T=image_t, image_S=image_s)
    kap = action.kappa()
    for j, val in kappa.items():
        if abs(cmath.exp(2j * math.pi * val) - cmath.exp(2j * math.pi * kap[j - 1])) > 1e-10:
            raise CoefficientFileError(f"{path}: kappa {j} inconsistent with action")
    comps = [dict() for _ in range(m)]
    for j, n, re, im in records:
        if not 1 <= j <= m:
            raise CoefficientFileError(f"{path}: component {j} out of range")
        val = re if (im == 0 and isinstance(re, int) and isinstance(im, int)) else complex(re, im)
        comps[j - 1][n] = val
    if n_max is None:
        n_max = max((max(c) for c in comps if c), default=0)
    return FourierExpansion(action, tuple(comps), n_max, label=label)


def save_jacobi(jac, path):
    lines = ["# jcf", f"# k = {jac.k}", f"# m = {jac.m}", f"# dmax = {jac.d_max}"]
    for (l, r) in sorted(jac.table):
        val = jac.table[(l, r)]
        lines.append(f"{l} {r} {_fmt_value(val)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_jacobi(path):
    k = m = d_max = None
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                if line.startswith("#"):
                    body = line[1:].strip()
                    if "=" in body:
                        key, _, val = body.partition("=")
                        key, val = key.strip(), val.strip()
                        if key == "k":
                            k = int(val)
                        elif key == "m":
                            m = int(val)
                        elif key == "dmax":
                            d_max = int(val)
                    continue
                parts = line.split()
                if len(parts) != 4:
                    raise ValueError("expected 'l r re im'")
                l, r = int(parts[0]), int(parts[1])
                re, im = _parse_number(parts[2]), _parse_number(parts[3])
                val = re if (im == 0 and isinstance(re, int) and isinstance(im, int)) else complex(re, im)
                if (l, r) in table and table[(l, r)] != val:
                    raise ValueError(f"duplicate key ({l},{r}) with conflicting values")
                table[(l, r)] = val
            except (ValueError, IndexError) as exc:
                raise CoefficientFileError(f"{path}:{lineno}: {exc}") from exc
    if k is None or m is None or d_max is None:
        raise CoefficientFileError(f"{path}: missing k/m/dmax header")
    return JacobiCoefficients(k=k, m=m, table=table, d_max=d_max)
