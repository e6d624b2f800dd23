import math
import os

import numpy as np
import pytest

import oracles
from vvlf import forms, modular_group as mg
from vvlf.special_functions import gamma

from conftest import DATA_DIR


# ----------------------------------------------------------------------
# built-in scalar forms
# ----------------------------------------------------------------------


def test_tau_normalization(delta):
    assert delta.coefficient(1, 1) == 1


def test_tau_against_naive_product(delta):
    ref = oracles.naive_tau(20)
    for n in range(1, 21):
        assert delta.coefficient(1, n) == ref[n], n
    assert ref[2] == -24 and ref[3] == 252


def test_scalar_basis_first_coefficient_one(scalar_forms):
    for k, f in scalar_forms.items():
        assert f.coefficient(1, 1) == 1, k


def test_scalar_basis_k16_q2_coefficient(scalar_forms):
    # Delta * E4 by naive multiplication
    tau = oracles.naive_tau(6)
    e4 = [1] + [240 * oracles.sigma_power(n, 3) for n in range(1, 6)]
    q2 = tau[2] * e4[0] + tau[1] * e4[1]
    assert q2 == 216
    assert scalar_forms[16].coefficient(1, 2) == q2


def test_scalar_basis_rejects_other_weights():
    with pytest.raises(ValueError):
        forms.scalar_basis(14)  # dim 0
    with pytest.raises(ValueError):
        forms.scalar_basis(24)  # dim 2


def test_growth_constant_positive(delta):
    assert delta.growth_constant() > 0


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------


def test_delta_at_i_matches_eta_product(delta):
    val, err = delta.evaluate(1j)
    eta24 = oracles.eta_product_at_i() ** 24
    assert abs(val[0] - eta24) < 1e-12 * eta24 + err
    # closed form (Gamma(1/4) / (2 pi^{3/4}))^24
    closed = (abs(gamma(0.25)) / (2.0 * math.pi ** 0.75)) ** 24
    assert abs(val[0] - closed) < 1e-10 * closed


def test_evaluate_zero_form():
    f = forms.FourierExpansion(mg.scalar_trivial(12), ({},), 10, label="zero")
    val, err = f.evaluate(0.5 + 1j)
    assert val[0] == 0 and err == 0.0


def test_delta_periodicity(delta):
    tau = 0.3 + 1.2j
    a, _ = delta.evaluate(tau)
    b, _ = delta.evaluate(tau + 1)
    assert abs(a[0] - b[0]) < 1e-12 * abs(a[0])


def test_evaluate_rejects_low_tau(delta):
    with pytest.raises(ValueError):
        delta.evaluate(0.5 + 0.01j)


def test_cusp_support_validation():
    act = mg.scalar_trivial(12)
    with pytest.raises(ValueError):
        forms.FourierExpansion(act, ({0: 5},), 10)


# ----------------------------------------------------------------------
# slash residuals
# ----------------------------------------------------------------------


def test_delta_slash_s_fixed_point(delta):
    assert forms.slash_residual(delta, mg.GE_S, tau_samples=(1j, 0.1 + 1.3j)) < 1e-10


def test_delta_slash_t(delta):
    assert forms.slash_residual(delta, mg.GE_T) < 1e-12


def test_modularity_random_elements(scalar_forms):
    # entries up to 50 need the q-sum resolved at heights ~ 1/(2|c|)
    delta_long = forms.delta_expansion(700)
    rng = np.random.default_rng(9)
    tested = 0
    while tested < 20:
        g = mg.GE_I
        for _ in range(int(rng.integers(1, 8))):
            g = g * (mg.GE_S if rng.random() < 0.4 else mg.t_power(int(rng.integers(-3, 4))))
        if max(abs(g.a), abs(g.b), abs(g.c), abs(g.d)) > 50:
            continue
        tested += 1
        assert forms.slash_residual(delta_long, g) < 1e-8, g
    assert forms.slash_residual(scalar_forms[16], mg.GE_S, tau_samples=(1j, 0.2 + 1.1j)) < 1e-8


def test_slash_cocycle_through_known_form(delta):
    # (f|g1)|g2 = f|(g1 g2) indirectly: both equal f for an invariant form
    rng = np.random.default_rng(31)
    for _ in range(5):
        g1 = mg.t_power(int(rng.integers(-3, 4))) * mg.GE_S
        g2 = mg.GE_S * mg.t_power(int(rng.integers(-3, 4)))
        assert forms.slash_residual(delta, g1 * g2) < 1e-9


def test_theta_decomposed_fixture_slash_invariance(jacobi_decomposed):
    for g in (mg.GE_T, mg.GE_S, mg.GE_T * mg.GE_S):
        assert forms.slash_residual(jacobi_decomposed, g) < 1e-6, g


def test_theta_vector_weight_half_invariance():
    th = forms.theta_vector_expansion(1, 400)
    for g in (mg.GE_T, mg.GE_S, mg.GroupElement(2, 1, 1, 1)):
        assert forms.slash_residual(th, g) < 1e-8


# ----------------------------------------------------------------------
# theta series / Jacobi tables
# ----------------------------------------------------------------------


def test_theta_series_multiplicities():
    t = forms.theta_series_coeffs(1, 2, 20)
    assert t[0] == 1 and t[4] == 2
    t1 = forms.theta_series_coeffs(1, 1, 20)
    assert t1[1] == 2  # r = +-1
    # m=2, j=1: r = 1 mod 4: r = -3 contributes at r^2 = 9, r = 3 does not
    t2 = forms.theta_series_coeffs(2, 1, 30)
    brute = {}
    for r in range(-30, 31):
        if r % 4 == 1 and r * r <= 30:
            brute[r * r] = brute.get(r * r, 0) + 1
    assert t2 == brute


def test_jacobi_invariant_on_full_fan(jacobi_fixture, jacobi_fullfan):
    assert jacobi_fullfan.table == jacobi_fixture.table
    # explicit cross-class equalities, exact
    assert jacobi_fixture.get(2, 2) == jacobi_fixture.get(1, 0)
    assert jacobi_fixture.get(3, 3) == jacobi_fixture.get(1, 1)
    assert jacobi_fixture.get(2, -1) == jacobi_fixture.get(2, 1)


def test_jacobi_invariant_randomized_tables():
    rng = np.random.default_rng(41)
    for _ in range(10):
        base = {}
        for (l, r) in ((1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1)):
            base[(l, r)] = int(rng.integers(-50, 50))
        jac = forms.JacobiCoefficients(k=10, m=1, table=dict(base), d_max=11)
        f = forms.theta_decompose(jac)
        back = forms.jacobi_reconstruct(f, 1)
        assert back.table == jac.table


def test_jacobi_reconstruct_zero_table():
    jac = forms.JacobiCoefficients(k=10, m=1, table={(1, 0): 0, (1, 1): 0}, d_max=4)
    f = forms.theta_decompose(jac)
    back = forms.jacobi_reconstruct(f, 1)
    assert back.table == jac.table


def test_theta_decompose_roundtrip_fixture(jacobi_fixture):
    f = forms.theta_decompose(jacobi_fixture)
    assert f.dim == 2
    back = forms.jacobi_reconstruct(f, 1)
    assert back.table == jacobi_fixture.table
    assert back.k == jacobi_fixture.k


def test_theta_decompose_index_arithmetic(jacobi_fixture):
    f = forms.theta_decompose(jacobi_fixture)
    # a(1,1) lands in component 1 at n with 4n... exponent (4*1-1)/4: nu = 0, kappa = 3/4
    assert f.coefficient(1, 0) == jacobi_fixture.get(1, 1) == 1
    assert f.kappa()[0] == pytest.approx(0.75)


def test_theta_decompose_rejects_incomplete():
    jac = forms.JacobiCoefficients(k=10, m=1, table={(1, 1): 1}, d_max=8)
    with pytest.raises(ValueError, match="missing"):
        forms.theta_decompose(jac)


def test_jacobi_inconsistent_table_rejected():
    with pytest.raises(ValueError, match="inconsistent"):
        forms.JacobiCoefficients(k=10, m=1, table={(1, 0): 1, (2, 2): 2}, d_max=8)


# ----------------------------------------------------------------------
# plus-space map
# ----------------------------------------------------------------------


def test_plus_map_zero_input():
    act = mg.weil_action(1, 10)
    f = forms.FourierExpansion(act, ({}, {}), 5)
    pf = forms.plus_space_map(f)
    assert pf.coeffs == {}


def test_plus_map_support_and_components(jacobi_decomposed, jacobi_fixture):
    pf = forms.plus_space_map(jacobi_decomposed)
    assert all(n % 4 in (0, 3) for n in pf.coeffs)
    assert pf.coeffs[3] == jacobi_decomposed.coefficient(1, 0)
    # c(n) = c_1(n) + c_2(n) with disjoint supports
    for n in pf.coeffs:
        assert pf.coeffs[n] == pf.c_part(1, n) + pf.c_part(2, n)
    # inverse indexing
    assert pf.component_of(3) == (1, 0)
    assert pf.component_of(4) == (2, 1)
    with pytest.raises(ValueError):
        pf.component_of(5)


def test_plus_map_rejects_wrong_dim(delta):
    with pytest.raises(ValueError):
        forms.plus_space_map(delta)


# ----------------------------------------------------------------------
# file formats
# ----------------------------------------------------------------------


def test_expansion_roundtrip_delta(tmp_path, delta):
    path = tmp_path / "delta.vvf"
    forms.save_expansion(delta, str(path))
    back = forms.load_expansion(str(path))
    assert back.coeffs == delta.coeffs
    assert back.action.twok == delta.action.twok
    # byte-identity on rewrite
    path2 = tmp_path / "delta2.vvf"
    forms.save_expansion(back, str(path2))
    assert path.read_bytes().replace(b"delta2", b"delta") == path2.read_bytes().replace(
        b"delta2", b"delta"
    )


def test_expansion_roundtrip_vector_fixture(tmp_path, jacobi_decomposed):
    path = tmp_path / "vec.vvf"
    forms.save_expansion(jacobi_decomposed, str(path))
    back = forms.load_expansion(str(path))
    assert back.coeffs == jacobi_decomposed.coeffs
    assert np.abs(back.action.image_S - jacobi_decomposed.action.image_S).max() < 1e-15


def test_shipped_decomposed_fixture_loads(jacobi_decomposed):
    path = os.path.join(DATA_DIR, "jacobi_k10_m1_decomposed.vvf")
    back = forms.load_expansion(path)
    assert back.coeffs == jacobi_decomposed.coeffs


def test_load_rejects_bad_record(tmp_path, delta):
    path = tmp_path / "bad.vvf"
    forms.save_expansion(delta, str(path))
    lines = path.read_text().splitlines()
    lines.append("1 0 7 0")  # support violation: n + kappa = 0 with nonzero value
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        forms.load_expansion(str(path))


def test_load_reports_line_numbers(tmp_path, delta):
    path = tmp_path / "bad2.vvf"
    forms.save_expansion(delta, str(path))
    n_lines = len(path.read_text().splitlines())
    with open(path, "a") as fh:
        fh.write("1 2 oops 0\n")
    with pytest.raises(forms.CoefficientFileError, match=str(n_lines + 1)):
        forms.load_expansion(str(path))


def test_jacobi_file_roundtrip(tmp_path, jacobi_fixture):
    path = tmp_path / "jac.jcf"
    forms.save_jacobi(jacobi_fixture, str(path))
    original = open(os.path.join(DATA_DIR, "jacobi_k10_m1.jcf"), "rb").read()
    assert path.read_bytes() == original


def test_linear_combination(delta):
    two = forms.linear_combination([(2.0, delta)])
    assert two.coefficient(1, 2) == 2 * delta.coefficient(1, 2)
    zero = forms.linear_combination([(1.0, delta), (-1.0, delta)])
    assert all(v == 0 for v in zero.coeffs[0].values())
