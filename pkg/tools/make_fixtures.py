"""Generate the shipped Jacobi-form fixtures.

The weight-10 index-1 Jacobi cusp form is built as theta1(tau,z)^2 * eta^18
in exact integer arithmetic (theta1^2 carries the eta^6 multiplier, so the
product transforms trivially).  The generator cross-checks the discriminant
invariant a(l,r) = a(l',r') for 4l - r^2 = 4l' - r'^2, r = r' mod 2 over the
full (l, r) fan before writing anything.

Writes (relative to the repo root):
    src/vvlf/data/jacobi_k10_m1.jcf           canonical keys only
    src/vvlf/data/jacobi_k10_m1_fullfan.jcf   redundant keys kept
    src/vvlf/data/jacobi_k10_m1_decomposed.vvf
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from vvlf import forms

L_MAX = 12
D_MAX = 4 * L_MAX - 1


def eta_power_18(n_max):
    p = forms._eta_product_series(n_max)
    p2 = forms._mul_trunc(p, p, n_max)
    p4 = forms._mul_trunc(p2, p2, n_max)
    p8 = forms._mul_trunc(p4, p4, n_max)
    p16 = forms._mul_trunc(p8, p8, n_max)
    return forms._mul_trunc(p16, p2, n_max)


def build_full_fan():
    n_max = L_MAX + 2
    p18 = eta_power_18(n_max)
    # theta1^2 in eighth-integral powers: 8*exponent = (2n+1)^2 + (2n'+1)^2
    table = {}
    bound = 8 * (L_MAX + 1)
    n = 0
    sq = []
    while (2 * n + 1) ** 2 <= bound:
        sq.append((n, (2 * n + 1) ** 2))
        n += 1
    pairs = [(a, b) for a in range(-len(sq), len(sq)) for b in range(-len(sq), len(sq))]
    for na in range(-len(sq) - 1, len(sq) + 1):
        for nb in range(-len(sq) - 1, len(sq) + 1):
            e8 = (2 * na + 1) ** 2 + (2 * nb + 1) ** 2
            if e8 > bound:
                continue
            r = na + nb + 1
            sign = -1 if (na + nb) % 2 == 0 else 1  # overall minus from theta1^2
            # multiply by q^{3/4} p18: 8l = e8 + 6 + 8j
            for j, pj in enumerate(p18):
                if pj == 0:
                    continue
                l8 = e8 + 6 + 8 * j
                if l8 % 8 != 0:
                    raise AssertionError("non-integral exponent")
                l = l8 // 8
                if l > L_MAX:
                    break
                key = (l, r)
                table[key] = table.get(key, 0) + sign * pj
    # keep the (l, r) fan with positive discriminant
    fan = {k: v for k, v in table.items() if 4 * k[0] - k[1] ** 2 > 0 and k[0] >= 1}
    # also confirm nothing lives on or below discriminant zero
    for (l, r), v in table.items():
        if 4 * l - r * r <= 0 and v != 0:
            raise AssertionError(f"cusp condition violated at {(l, r)}: {v}")
    # normalize a(1, 1) = 1
    norm = fan[(1, 1)]
    if abs(norm) != 1:
        raise AssertionError(f"unexpected normalization {norm}")
    fan = {k: v * norm for k, v in fan.items()}
    return fan


def main():
    fan = build_full_fan()
    # invariant: dependence only on (4l - r^2, r mod 2)
    by_class = {}
    for (l, r), v in fan.items():
        cls = (4 * l - r * r, r % 2)
        if cls in by_class and by_class[cls] != v:
            raise AssertionError(f"invariant broken at {(l, r)}: {v} vs {by_class[cls]}")
        by_class[cls] = v
    assert fan[(1, 1)] == 1 and fan[(1, 0)] == -2, (fan[(1, 1)], fan[(1, 0)])

    data_dir = os.path.join(os.path.dirname(__file__), "..", "src", "vvlf", "data")
    os.makedirs(data_dir, exist_ok=True)

    canonical = {k: v for k, v in fan.items() if k[1] in (0, 1) and 4 * k[0] - k[1] ** 2 <= D_MAX}
    jac = forms.JacobiCoefficients(k=10, m=1, table=canonical, d_max=D_MAX)
    forms.save_jacobi(jac, os.path.join(data_dir, "jacobi_k10_m1.jcf"))

    full = forms.JacobiCoefficients(
        k=10, m=1, table={k: v for k, v in fan.items() if 4 * k[0] - k[1] ** 2 <= D_MAX},
        d_max=D_MAX,
    )
    # writing the full fan verbatim (not canonicalized) to exercise loaders
    lines = ["# jcf", "# k = 10", "# m = 1", f"# dmax = {D_MAX}"]
    for (l, r) in sorted(k for k in fan if 4 * k[0] - k[1] ** 2 <= D_MAX):
        lines.append(f"{l} {r} {fan[(l, r)]} 0")
    with open(os.path.join(data_dir, "jacobi_k10_m1_fullfan.jcf"), "w") as fh:
        fh.write("\n".join(lines) + "\n")

    decomposed = forms.theta_decompose(jac)
    forms.save_expansion(decomposed, os.path.join(data_dir, "jacobi_k10_m1_decomposed.vvf"))
    print("wrote fixtures:", sorted(os.listdir(data_dir)))
    print("a(1,1) =", fan[(1, 1)], " a(1,0) =", fan[(1, 0)], " a(2,1) =", fan[(2, 1)],
          " a(2,0) =", fan[(2, 0)])


if __name__ == "__main__":
    main()
