"""SL2(Z) elements, generator words, metaplectic lifts, and unitary actions.

A ``UnitaryAction`` bundles the weight with the *combined* multiplier-times-
representation on the generators T and S.  Evaluation at an arbitrary group
element goes through the Euclidean word decomposition; for half-integral
weight the square-root branch is tracked through the metaplectic group, with
the center correction U(Z) = image_S^4 applied when the composed branch
disagrees with the standard lift.
"""

import cmath
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

_UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class GroupElement:
    """An integer matrix (a b; c d) with determinant 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for x in (self.a, self.b, self.c, self.d):
            if not isinstance(x, int):
                raise ValueError("entries must be integers")
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1, got {self}")

    def __mul__(self, other):
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def neg(self):
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def apply(self, tau):
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def automorphy(self, tau):
        """c*tau + d."""
        return self.c * tau + self.d


GE_I = GroupElement(1, 0, 0, 1)
GE_S = GroupElement(0, -1, 1, 0)
GE_T = GroupElement(1, 1, 0, 1)


def t_power(n):
    return GroupElement(1, n, 0, 1)


def decompose_word(g):
    """Write g as +/- a word in S and T-powers.

    Returns (sign, tokens) with tokens a list of ("S",) and ("T", n) entries
    whose left-to-right matrix product equals sign * g.  Token count is
    O(log max entry) since T-powers carry their exponent.
    """
    if not isinstance(g, GroupElement):
        g = GroupElement(*g)
    # Left-reduce by S T^{-n}: first column (a, c) -> (-c, a - n c).
    m = g
    exponents = []
    while m.c != 0:
        n = round(m.a / m.c)
        exponents.append(n)
        m = GE_S * (t_power(-n) * m)
    # Now m = +/- T^b.
    sign = 1 if m.a == 1 else -1
    tail = m.b * sign
    tokens = []
    # Unwind: g = T^{n1} S^{-1} T^{n2} S^{-1} ... m  and  S^{-1} = -S.
    for n in exponents:
        if n != 0:
            tokens.append(("T", n))
        tokens.append(("S",))
        sign = -sign
    if tail != 0:
        tokens.append(("T", tail))
    return sign, tokens


def word_product(tokens):
    out = GE_I
    for tok in tokens:
        out = out * (GE_S if tok[0] == "S" else t_power(tok[1]))
    return out


# ----------------------------------------------------------------------
# Metaplectic elements
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class MetaElement:
    """Pair (gamma, branch) with phi(tau) = branch * sqrt(c tau + d)."""

    g: GroupElement
    branch: int = 1

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")

    def phi(self, tau):
        return self.branch * cmath.sqrt(self.g.c * tau + self.g.d)

    def __mul__(self, other):
        g3 = self.g * other.g
        tau0 = 1j
        val = self.phi(other.g.apply(tau0)) * other.phi(tau0)
        ref = cmath.sqrt(g3.c * tau0 + g3.d)
        ratio = val / ref
        branch = 1 if ratio.real > 0 else -1
        return MetaElement(g3, branch)


def standard_lift(g):
    return MetaElement(g, 1)


# ----------------------------------------------------------------------
# Unitary actions
# ----------------------------------------------------------------------


def _as_unitary(mat, name):
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square")
    resid = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    if resid > _UNITARY_TOL:
        raise ValueError(f"{name} not unitary (residual {resid:.2e})")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class UnitaryAction:
    """Combined multiplier-representation data on the generators.

    ``twok`` is twice the weight (so half-integral weights stay exact).
    ``image_T`` must be diagonal; the Fourier offsets kappa_j are read off
    its diagonal.
    """

    label: str
    twok: int
    image_T: np.ndarray
    image_S: np.ndarray

    def __post_init__(self):
        t = _as_unitary(self.image_T, "image_T")
        s = _as_unitary(self.image_S, "image_S")
        object.__setattr__(self, "image_T", t)
        object.__setattr__(self, "image_S", s)
        if t.shape != s.shape:
            raise ValueError("generator images must have equal dimension")
        off = np.abs(t - np.diag(np.diag(t))).max()
        if off > _UNITARY_TOL:
            raise ValueError("image_T must be diagonal (diagonalize first)")
        if self.twok % 2 == 0:
            # Genuine representations of SL2(Z) satisfy the defining relations.
            eye = np.eye(t.shape[0])
            s2 = s @ s
            if np.abs(np.linalg.matrix_power(s, 4) - eye).max() > _UNITARY_TOL:
                raise ValueError("image_S^4 != I for integral weight")
            st = s @ t
            if np.abs(st @ st @ st - s2).max() > _UNITARY_TOL:
                raise ValueError("(image_S image_T)^3 != image_S^2")

    @property
    def dim(self):
        return self.image_T.shape[0]

    @property
    def weight(self):
        return self.twok / 2.0

    @property
    def is_half_integral(self):
        return self.twok % 2 != 0

    def kappa(self):
        """Offsets in [0, 1) with e^{2 pi i kappa_j} = (image_T)_jj."""
        ang = np.angle(np.diag(self.image_T)) / (2.0 * math.pi)
        ang = ang - np.floor(ang)
        ang[np.minimum(ang, 1.0 - ang) < 1e-13] = 0.0
        return ang

    def _diag_t_power(self, n):
        return np.diag(self.image_T) ** n

    def evaluate(self, g):
        """U(g) via the generator word (metaplectic branch tracked)."""
        sign, tokens = decompose_word(g)
        if sign < 0:
            tokens = [("S",), ("S",)] + tokens
        u = np.eye(self.dim, dtype=complex)
        for tok in tokens:
            if tok[0] == "S":
                u = u @ self.image_S
            else:
                u = u @ np.diag(self._diag_t_power(tok[1]))
        if self.is_half_integral:
            meta = reduce(
                lambda acc, tok: acc
                * (MetaElement(GE_S) if tok[0] == "S" else MetaElement(t_power(tok[1]))),
                tokens,
                MetaElement(GE_I),
            )
            if meta.g != g:
                raise AssertionError("word product mismatch")
            if meta.branch < 0:
                # Composed word realizes Z * standard lift; undo the center.
                u = self.center_image() @ u
        return u

    def u_minus_identity(self):
        """U(-I) (for half-integral weight: image of the standard lift)."""
        return self.evaluate(GE_I.neg())

    def center_image(self):
        """Image of (I, -1); equals image_S^4 and squares to I."""
        s2 = self.image_S @ self.image_S
        return s2 @ s2

    def conjugate(self):
        return UnitaryAction(
            label=self.label + "-conj",
            twok=self.twok,
            image_T=self.image_T.conj(),
            image_S=self.image_S.conj(),
        )


def scalar_trivial(k):
    """The one-dimensional trivial action at even integer weight k."""
    if k % 2 != 0:
        raise ValueError("scalar trivial action requires even k")
    one = np.eye(1, dtype=complex)
    return UnitaryAction(label=f"trivial-k{k}", twok=2 * k, image_T=one, image_S=one)


def weil_action(m, jacobi_weight):
    """The 2m-dimensional action attached to index-m Jacobi forms.

    image_T e_j = e^{-2 pi i j^2/(4m)} e_j and image_S is the normalized
    DFT-type matrix with prefactor e^{i pi/4}/sqrt(2m).  Used at weight
    jacobi_weight - 1/2.  The weight-1/2 multiplier cancels against its
    conjugate in the combined convention, so no twist appears here.
    """
    if m < 1:
        raise ValueError("index m must be >= 1")
    if jacobi_weight % 2 != 0:
        raise ValueError("jacobi weight must be even")
    n = 2 * m
    j = np.arange(1, n + 1)
    image_t = np.diag(np.exp(-2j * np.pi * j ** 2 / (4.0 * m)))
    jj = np.outer(j, j)  # rows j', columns j after transpose below
    image_s = np.exp(1j * np.pi / 4) / math.sqrt(n) * np.exp(2j * np.pi * jj / n)
    # column j = image of e_j; exponent j*j' is symmetric so no transpose needed
    return UnitaryAction(
        label=f"weil-m{m}", twok=2 * jacobi_weight - 1, image_T=image_t, image_S=image_s
    )


# ----------------------------------------------------------------------
# Induction from Gamma0(N)
# ----------------------------------------------------------------------


def _p1_classes(n):
    """Representative tags of P^1(Z/N) and a lookup for arbitrary (c, d)."""
    units = [u for u in range(1, n) if math.gcd(u, n) == 1] or [1]
    seen = {}
    tags = []
    for c in range(n):
        for d in range(n):
            if math.gcd(math.gcd(c, d), n) != 1:
                continue
            orbit = {((u * c) % n, (u * d) % n) for u in units}
            tag = min(orbit)
            if tag not in seen:
                seen[tag] = len(tags)
                tags.append(tag)
            for p in orbit:
                seen[p] = seen[tag]
    return tags, seen


def _lift_to_sl2(c0, d0, n):
    """Some (a b; c d) in SL2(Z) with (c, d) = (c0, d0) mod N."""
    for dc in range(0, 6 * n + 1):
        for dd in range(0, 6 * n + 1):
            c = c0 + dc * n
            d = d0 + dd * n
            if math.gcd(c, d) == 1:
                g, x, y = _ext_gcd(c, d)
                # x*c + y*d = 1 -> a = y, b = -x gives a*d - b*c = 1
                return GroupElement(y, -x, c, d)
    raise RuntimeError("no coprime lift found")


def _ext_gcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class InducedAction:
    """Diagonalized induced action plus the raw permutation data.

    ``action.image_T`` is diagonal in a DFT basis per T-cycle of the coset
    permutation; ``basis_change`` V satisfies V^H rho(T) V = image_T, and
    component indices downstream refer to the diagonalized basis.
    """

    level: int
    action: UnitaryAction
    representatives: tuple
    basis_change: np.ndarray
    permutation_T: np.ndarray
    permutation_S: np.ndarray


def induced_action_gamma0(N, k):
    """Induce the trivial character of Gamma0(N) up to SL2(Z).

    Returns an :class:`InducedAction`; the representative list starts with
    the identity, and every element of Gamma0(N) evaluates to the identity
    matrix.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if k % 2 != 0:
        raise ValueError("k must be even")
    tags, seen = _p1_classes(N)
    m = len(tags)
    # Identity coset first.
    id_idx = seen[(0 % N, 1 % N)]
    order = [id_idx] + [i for i in range(m) if i != id_idx]
    reorder = {old: new for new, old in enumerate(order)}
    reps = [None] * m
    for old_idx, tag in enumerate(tags):
        reps[reorder[old_idx]] = _lift_to_sl2(tag[0], tag[1], N)
    reps[0] = GE_I

    def class_of(g):
        return reorder[seen[(g.c % N, g.d % N)]]

    def perm_matrix(g):
        # (rho(g))_{j, sigma(j)} = 1 where rep_j * g lies in the sigma(j) coset.
        p = np.zeros((m, m), dtype=complex)
        for j in range(m):
            p[j, class_of(reps[j] * g)] = 1.0
        return p

    rho_t = perm_matrix(GE_T)
    rho_s = perm_matrix(GE_S)

    # Diagonalize rho(T) by a DFT per cycle of sigma_T.
    sigma = [int(np.argmax(rho_t[j].real)) for j in range(m)]
    visited = [False] * m
    v = np.zeros((m, m), dtype=complex)
    col = 0
    for j0 in range(m):
        if visited[j0]:
            continue
        cycle = [j0]
        visited[j0] = True
        nxt = sigma[j0]
        while nxt != j0:
            cycle.append(nxt)
            visited[nxt] = True
            nxt = sigma[nxt]
        length = len(cycle)
        for ell in range(length):
            for pos, j in enumerate(cycle):
                v[j, col] = np.exp(2j * np.pi * ell * pos / length) / math.sqrt(length)
            col += 1
    image_t = v.conj().T @ rho_t @ v
    image_t = np.diag(np.diag(image_t))  # strip numerically zero off-diagonals
    image_s = v.conj().T @ rho_s @ v
    action = UnitaryAction(
        label=f"induced-k{k}-N{N}", twok=2 * k, image_T=image_t, image_S=image_s
    )
    return InducedAction(
        level=N,
        action=action,
        representatives=tuple(reps),
        basis_change=v,
        permutation_T=rho_t,
        permutation_S=rho_s,
    )


def gamma0_index(N):
    """Index of Gamma0(N) in SL2(Z)."""
    idx = N
    seen = set()
    nn = N
    p = 2
    while nn > 1:
        if nn % p == 0:
            if p not in seen:
                seen.add(p)
                idx += idx // p
            while nn % p == 0:
                nn //= p
        p += 1
    return idx


def kappa_offsets(action):
    """Fourier offsets of an action with diagonal image_T."""
    return action.kappa()
