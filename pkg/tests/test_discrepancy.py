import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle_values as OV
from lfzeros.discrepancy import (BSWindow, RectFamily, bs_B, bs_F, bs_F_hat, bs_H, bs_H_series,
                                 bs_K, bs_fourier_check, box_discrepancy, box_masses,
                                 default_box_L, k_hat, random_reference, sample_L_vector,
                                 sup_box_discrepancy, tail_distribution_Psi)
from lfzeros.lfunc import LinearCombination, eval_logL, single, zeta_spec
from lfzeros.primes import prime_table

ZETA = single(zeta_spec())


# ------------------------------------------------------------ sampling

def test_far_right_bound():
    emp = sample_L_vector(ZETA, 2.0, 100.0)
    ps = prime_table(10**6).upto(10**6).astype(float)
    bound = float(np.sum(2 * ps**-2.0))
    assert emp.samples.shape == (1000, 2) and emp.skipped == 0
    assert np.max(np.abs(emp.samples)) <= bound


def test_sampler_matches_pointwise_log():
    emp = sample_L_vector(ZETA, 0.6, 200.0)
    for i in range(0, emp.ts.size, 211):
        v = eval_logL(zeta_spec(), complex(0.6, emp.ts[i]))
        assert abs(emp.samples[i, 0] - v.real) < 1e-8
        assert abs(emp.samples[i, 1] - v.imag) < 1e-8


def test_sampler_deterministic():
    a = sample_L_vector(ZETA, 0.7, 150.0)
    b = sample_L_vector(ZETA, 0.7, 150.0)
    assert np.array_equal(a.samples, b.samples)


def test_grid_step_limit():
    with pytest.raises(ValueError):
        sample_L_vector(ZETA, 0.7, 100.0, grid_step=0.2)


def test_arg_histogram_symmetric_and_close_to_model():
    emp = sample_L_vector(ZETA, 0.6, 1000.0)
    args = emp.samples[:, 1]
    edges = np.linspace(-1.5, 1.5, 7)
    h, _ = np.histogram(args, bins=edges)
    n = args.size
    # grid points are correlated over ~1 unit of t; use an effective sample size of T
    scale = n / 1000.0
    m = h[::-1]
    assert np.all(np.abs(h - m) <= 3 * np.sqrt((h + m) * scale) + 1)
    ref = random_reference(ZETA, 0.6, 10**5, seed=0)
    hr, _ = np.histogram(ref.samples[:, 1], bins=edges)
    p_emp, p_ref = h / n, hr / ref.samples.shape[0]
    se = np.sqrt(p_ref * (1 - p_ref) / 1000.0)
    assert np.all(np.abs(p_emp - p_ref) <= 3 * se + 0.01)


# ------------------------------------------------------------ boxes

def _brute_box_mass(samples, lo, hi):
    return np.mean(np.all((samples > lo) & (samples <= hi), axis=1))


@given(st.integers(0, 2**31), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_box_masses_against_brute_force(seed, d):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=(300, d))
    fam = RectFamily.from_quantiles(rng.normal(size=(500, d)), k=4)
    masses, pairs = box_masses(s, fam)
    assert masses.shape == tuple(len(p[0]) for p in pairs)
    assert masses.min() >= -1e-12 and masses.max() <= 1 + 1e-12
    for _ in range(20):
        k = tuple(rng.integers(len(p[0])) for p in pairs)
        lo = np.array([fam.extended(a)[pairs[a][0][k[a]]] for a in range(d)])
        hi = np.array([fam.extended(a)[pairs[a][1][k[a]]] for a in range(d)])
        assert abs(masses[k] - _brute_box_mass(s, lo, hi)) < 1e-12


def test_box_monotone_and_additive():
    rng = np.random.default_rng(1)
    s = rng.normal(size=(2000, 2))
    fam = RectFamily((np.array([-1.0, 0.0, 1.0]), np.array([-0.5, 0.5])))
    m, pairs = box_masses(s, fam)
    ext0, ext1 = fam.extended(0), fam.extended(1)
    idx0 = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(*pairs[0]))}
    idx1 = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(*pairs[1]))}
    # additivity along axis 0: (e0, e2] = (e0, e1] + (e1, e2]
    for j in idx1.values():
        for a in range(len(ext0)):
            for c in range(a + 2, len(ext0)):
                for b in range(a + 1, c):
                    assert abs(m[idx0[(a, c)], j] - m[idx0[(a, b)], j] - m[idx0[(b, c)], j]) < 1e-12
                    assert m[idx0[(a, c)], j] >= m[idx0[(a, b)], j] - 1e-15
    assert abs(m[idx0[(0, len(ext0) - 1)], idx1[(0, len(ext1) - 1)]] - 1) < 1e-15


def test_self_discrepancy_zero():
    emp = sample_L_vector(ZETA, 0.6, 300.0)
    assert sup_box_discrepancy(emp, ZETA, reference=emp.samples).value == 0.0


def test_two_references_noise_floor():
    n = 20000
    a = random_reference(ZETA, 0.6, n, seed=10).samples
    b = random_reference(ZETA, 0.6, n, seed=11).samples
    r = sup_box_discrepancy(a, ZETA, reference=b)
    lo, hi = np.array(r.box).T
    p = _brute_box_mass(b, lo, hi)
    assert r.value < 3 * math.sqrt(p * (1 - p) * 2 / n)


def test_permutation_invariance():
    a = random_reference(ZETA, 0.6, 5000, seed=1).samples
    b = random_reference(ZETA, 0.6, 5000, seed=2).samples
    perm = [1, 0]
    r1 = sup_box_discrepancy(a, ZETA, reference=b)
    r2 = sup_box_discrepancy(a[:, perm], ZETA, reference=b[:, perm])
    assert r1.value == r2.value


def test_psi_limits():
    comb = LinearCombination([zeta_spec(), zeta_spec()], [1, 2])
    ref = random_reference(comb, 0.6, 5000, seed=0)
    L = default_box_L(1.0, 0.6)
    big = L + math.log(np.sum(np.abs(comb.weights))) + 1e-9
    assert tail_distribution_Psi(ref, comb, big, L) == 0.0
    inbox = np.mean(np.all(np.abs(ref.samples) < L, axis=1))
    assert tail_distribution_Psi(ref, comb, -1e300, L) == pytest.approx(inbox)
    taus = np.linspace(-3, 3, 13)
    v = tail_distribution_Psi(ref, comb, taus, L)
    assert np.all(np.diff(v) <= 0)


# ----------------------------------------------------- Beurling-Selberg

XS = np.linspace(-50, 50, 10**5)


def test_K_at_zero():
    assert bs_K(0.0) == 1.0


def test_H_matches_series():
    for z in (0.3, 1.0, 2.5, -3.7, 17.2, 0.001):
        assert abs(bs_H(z) - bs_H_series(z)) < 1e-10


def test_sign_majorant_minorant():
    sg = np.sign(XS)
    assert np.all(bs_B(XS, -1) <= sg + 1e-12)
    assert np.all(bs_B(XS, +1) >= sg - 1e-12)
    assert np.max(np.abs(bs_B(XS, 1) - bs_B(XS, -1) - 2 * bs_K(XS))) < 1e-12


@pytest.mark.parametrize("delta", [1.0, 4.0, 16.0])
def test_window_sandwich(delta):
    w = BSWindow(0.0, 1.0, delta)
    x = np.linspace(-20, 20, 10**5)
    F = bs_F(w, x)
    ind = ((x >= 0) & (x <= 1)).astype(float)
    assert np.max(np.abs(F)) <= 1 + 1e-12
    gap = ind - F
    assert gap.min() >= -1e-12
    assert np.all(gap <= bs_K(delta * (x - w.a)) + bs_K(delta * (w.b - x)) + 1e-12)


def test_k_hat_values():
    assert abs(k_hat(0.0) - 1) < 1e-8
    assert abs(k_hat(0.5) - 0.5) < 1e-8
    assert abs(k_hat(1.5)) < 1e-8


@pytest.mark.parametrize("delta", [1.0, 4.0, 16.0])
def test_F_hat_band_limited(delta):
    rep = bs_fourier_check(BSWindow(0.0, 1.0, delta))
    assert rep.passed and rep.outside_max_modulus < 1e-4
    # the independent direct transform agrees that nothing leaks past the band
    assert OV.FHAT_OUTSIDE_DIRECT[delta] < 1e-4


def test_F_hat_matches_direct_inside_band():
    import oracles
    w = BSWindow(0.0, 1.0, 4.0)
    ys = np.array([0.0, 0.7, 2.1, -3.3])
    direct = oracles.fourier_direct(lambda x: bs_F(w, x), ys, L=100.0)
    assert np.max(np.abs(direct - bs_F_hat(w, ys))) < 1e-4


def test_box_discrepancy_reports_box():
    a = np.array([[0.0, 0.0], [1.0, 1.0]])
    b = np.array([[0.0, 0.0], [0.0, 0.0]])
    fam = RectFamily((np.array([0.5]), np.array([0.5])))
    r = box_discrepancy(a, b, fam)
    assert r.value == pytest.approx(0.5)
    assert r.n_boxes == 9
