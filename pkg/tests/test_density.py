import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle_values as OV
from lfzeros.density import (FourierPoint, GridSpec, char_fn, compute_K0, d1_constant,
                             gaussian_model, gaussian_moment, invert_density, k0_closed_form_J2,
                             phi_p)
from lfzeros.errors import InsufficientDecay
from lfzeros.lfunc import dirichlet_spec, zeta_spec
from lfzeros.random_model import MCConfig, sample_logs

from oracles import gaussian_moment_quad, phi_second_derivative_fd

Z = [zeta_spec()]
PAIR = [zeta_spec(), dirichlet_spec(4, (1,))]


# ---------------------------------------------------------------- phi_p

def test_phi_origin():
    assert phi_p(Z, 0.6, 2, FourierPoint((0.0,), (0.0,))) == pytest.approx(1.0, abs=1e-15)
    assert char_fn(PAIR, 0.6, FourierPoint((0.0, 0.0), (0.0, 0.0))) == pytest.approx(1.0, abs=1e-14)


def test_phi_modulus_bounded():
    rng = np.random.default_rng(0)
    X = rng.normal(scale=2, size=(1000, 2))
    Y = rng.normal(scale=2, size=(1000, 2))
    for p in (2, 3, 101):
        v = phi_p(PAIR, 0.55, p, (X, Y))
        assert np.max(np.abs(v)) <= 1 + 1e-12


def test_phi_second_order():
    f = lambda x: phi_p(Z, 1.0, 2, FourierPoint((x,), (0.0,))).real
    assert abs(phi_second_derivative_fd(f) - OV.PHI2_SERIES_COEF) < 1e-4


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=25, deadline=None)
def test_char_fn_conjugate_symmetry(x1, x2, y1, y2):
    a = char_fn(PAIR, 0.7, FourierPoint((x1, x2), (y1, y2)), prime_cutoff=500)
    b = char_fn(PAIR, 0.7, FourierPoint((-x1, -x2), (-y1, -y2)), prime_cutoff=500)
    assert abs(a - np.conj(b)) < 1e-12
    assert abs(a) <= 1 + 1e-12


@given(st.floats(0.02, 0.6), st.floats(-0.6, 0.6))
@settings(max_examples=15, deadline=None)
def test_char_fn_cutoff_monotone(x, y):
    pt = FourierPoint((x,), (y,))
    vals = [abs(char_fn(Z, 0.6, pt, prime_cutoff=c)) for c in (10, 100, 1000, 10**4)]
    assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))


def test_char_fn_matches_mc():
    # E exp(2 pi i (x Re log L + y Im log L)) over random-model samples with the same cutoff
    logs = sample_logs(Z, [0.7], MCConfig(n_samples=10**5, Y=1e3, tail="factors", seed=1))[:, 0, 0]
    for x, y in ((0.3, 0.0), (0.1, -0.25)):
        mc = np.mean(np.exp(2j * np.pi * (x * logs.real + y * logs.imag)))
        exact = char_fn(Z, 0.7, FourierPoint((x,), (y,)), prime_cutoff=1e3)
        assert abs(mc - exact) < 4 / math.sqrt(10**5)


# ------------------------------------------------------------- inversion

@pytest.fixture(scope="module")
def grid06():
    return invert_density(Z, 0.6, GridSpec(8.0, 64))


def test_density_mass_and_flags(grid06):
    assert abs(grid06.mass() - 1) < 1e-2
    assert abs(grid06.cell_mass.sum() - 1) < 1e-2
    assert grid06.boundary_modulus < 1e-10
    assert grid06.imag_residue < 1e-10
    assert grid06.values.min() > -1e-8


def test_density_conjugation_symmetry(grid06):
    H = grid06.values
    # axis 1 is v; v -> -v maps index k to n - k (index 0 is -W, its own image under periodisation)
    flipped = np.roll(H[:, ::-1], 1, axis=1)
    assert np.max(np.abs(H - flipped)) < 1e-6


def test_mc_histogram_symmetric_in_v():
    logs = sample_logs(Z, [0.6], MCConfig(n_samples=2 * 10**5, Y=1e4, tail="factors", seed=2))[:, 0, 0]
    edges = np.linspace(-2, 2, 9)
    h, _ = np.histogram(logs.imag, bins=edges)
    mirrored = h[::-1]
    se = np.sqrt(h + mirrored)
    assert np.all(np.abs(h - mirrored) <= 3 * np.maximum(se, 1))


def test_insufficient_decay():
    with pytest.raises(InsufficientDecay):
        invert_density(Z, 3.0, GridSpec(8.0, 8, max_n=8))


def test_gaussian_model_properties():
    gm = gaussian_model(1, [1.0], 1e3)
    L = math.log(1e3)
    assert gm.density(np.zeros(1), np.zeros(1))[0] == pytest.approx(1 / (math.pi * L))
    u = np.linspace(-15, 15, 601)
    U, V = np.meshgrid(u, u, indexing="ij")
    d = gm.density(U.reshape(-1, 1), V.reshape(-1, 1))
    assert abs(d.sum() * (u[1] - u[0]) ** 2 - 1) < 1e-9
    gm2 = gaussian_model(2, [1.0, 2.0], 50)
    assert gm2.density(np.zeros(2), np.zeros(2))[0] == pytest.approx((math.pi * math.log(50)) ** -2 / 2)
    with pytest.raises(ValueError):
        gaussian_model(1, [1.0], 3)


def test_gaussian_model_vs_inverted_origin():
    G = 1e3
    g = invert_density(Z, 0.5 + 1 / G, GridSpec(8.0, 64), tail="gaussian")
    ref = gaussian_model(1, [1.0], G).density(np.zeros(1), np.zeros(1))[0]
    assert abs(g.at([0.0, 0.0]) / ref - 1) < 0.15


# ------------------------------------------------------ moments and K0

def test_gaussian_moment_closed_forms():
    assert gaussian_moment((0, 0), (1.0, 3.0)) == pytest.approx(math.sqrt(math.pi) * math.sqrt(3 * math.pi))
    assert gaussian_moment((1, 2), (1.0, 1.0)) == 0.0
    assert gaussian_moment((2,), (1.0,)) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-15)
    assert abs(gaussian_moment((2,), (1.0,)) - gaussian_moment_quad((2,), (1.0,))) < 1e-10


def test_gaussian_moment_frozen_quadrature():
    for l, v in OV.GAUSS_MOM_QUAD.items():
        xi = {(2,): (1.0,), (0, 0): (1.0, 2.0), (4, 2): (0.5, 1.5), (2, 2, 2): (1.0, 1.0, 3.0),
              (6,): (2.0,)}[l]
        assert abs(gaussian_moment(l, xi) - v) < 1e-8


def test_k0_closed_form_examples():
    assert k0_closed_form_J2(1, 1) == pytest.approx(0.0317468, abs=5e-8)
    for xi in ((1, 1), (1, 4), (0.5, 2)):
        r = compute_K0(2, xi)
        assert abs(r.value / k0_closed_form_J2(*xi) - 1) < 1e-4


def test_k0_symmetric_regions():
    r = compute_K0(3, (1.0, 1.0, 1.0))
    v = r.region_values
    assert max(v) - min(v) < 1e-12
    assert r.value > 0


def test_k0_montecarlo_small():
    r = compute_K0(2, (1.0, 4.0), method="montecarlo", budget=2 * 10**5, seed=3)
    assert abs(r.value - k0_closed_form_J2(1, 4)) < 3 * r.abs_error_estimate
    assert r.n_samples == 2 * 10**5


def test_k0_J1():
    r = compute_K0(1, (2.0,))
    assert abs(r.value) < 1e-15 and r.flags
    assert abs(d1_constant((0,), (0,), (2.0,))) < 1e-12


def test_d1_consistency():
    xi = (1.0, 1.0)
    k0 = compute_K0(2, xi).value
    d1 = d1_constant((0, 0), (0, 0), xi)
    assert abs(2 * math.pi * k0 - d1 / (2 * math.pi**2 * 1.0)) < 1e-6 * d1
    assert d1_constant((0, 0), (1, 0), xi) == 0.0
