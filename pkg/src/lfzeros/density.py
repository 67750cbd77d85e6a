"""Characteristic function of the random model, density inversion, Gaussian
leading terms and the constant K0."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, prod
from typing import Sequence

import numpy as np
from scipy.special import erf, gammainc, gammaincc

from .errors import BudgetExhausted, InsufficientDecay
from .lfunc import LFunctionSpec
from .primes import prime_table
from .random_model import tail_covariance

PHI_MIN_NODES = 64
PHI_TOL = 1e-12
DEFAULT_CUTOFF = 10**4


@dataclass(frozen=True)
class FourierPoint:
    x: tuple
    y: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in np.atleast_1d(self.x))
        y = tuple(float(v) for v in np.atleast_1d(self.y))
        if len(x) != len(y) or not np.all(np.isfinite(x + y)):
            raise ValueError("x and y must be finite with equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


def _points(point, J):
    """Normalise a FourierPoint or an (X, Y) pair of (n, J) arrays."""
    if isinstance(point, FourierPoint):
        X, Y = np.array([point.x]), np.array([point.y])
        single = True
    else:
        X, Y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in point)
        single = False
    if X.shape[1] != J or Y.shape != X.shape:
        raise ValueError(f"points must have {J} coordinates")
    return X, Y, single


def _local_logs(specs, sigma, p, theta):
    """g_j(e^{i theta} p^-sigma) = -log(1 - alpha_j(p) e^{i theta} p^-sigma), shape (J, M)."""
    u = np.exp(1j * theta) * p ** (-sigma)
    return np.array([-np.log1p(-complex(m.alpha(p)) * u) for m in specs])


def _phi_nodes(specs, sigma, p, X, Y, M):
    theta = 2 * np.pi * np.arange(M) / M
    g = _local_logs(specs, sigma, p, theta)
    ph = 2 * np.pi * (X @ g.real + Y @ g.imag)  # (n, M)
    return np.exp(1j * ph).mean(axis=1)


def phi_p(specs: Sequence[LFunctionSpec], sigma: float, p: int, point) -> complex | np.ndarray:
    """E exp(2 pi i [x . Re g(X(p) p^-sigma) + y . Im g(X(p) p^-sigma)]) for one prime.

    Trapezoidal rule in theta with at least 64 nodes, doubled until two
    successive rules agree to 1e-12. Skips the doubling when the phase
    amplitude is so small that 64 nodes are exact to machine precision.
    """
    if not sigma > 0.5:
        raise ValueError("sigma > 1/2 required")
    X, Y, single = _points(point, len(specs))
    amp = 2 * np.pi * float(np.max(np.abs(X).sum(1) + np.abs(Y).sum(1), initial=0.0))
    gmax = max(abs(np.log1p(-abs(complex(m.alpha(p))) * p ** (-sigma))) for m in specs)
    M = PHI_MIN_NODES
    val = _phi_nodes(specs, sigma, p, X, Y, M)
    if amp * gmax >= 4.0:
        while M < 2**16:
            M *= 2
            new = _phi_nodes(specs, sigma, p, X, Y, M)
            done = np.max(np.abs(new - val)) < PHI_TOL
            val = new
            if done:
                break
    return complex(val[0]) if single else val


def tail_quadratic_form(specs, sigma, cutoff, X, Y):
    """Exponent of the Gaussian factor for primes beyond ``cutoff``."""
    C = tail_covariance(specs, [sigma], cutoff)
    Q = 0.5 * (np.einsum("nj,jk,nk->n", X, C.real, X) + np.einsum("nj,jk,nk->n", Y, C.real, Y))
    Q -= np.einsum("nj,jk,nk->n", X, C.imag, Y)
    return -2 * np.pi**2 * Q


def char_fn(specs: Sequence[LFunctionSpec], sigma: float, point, prime_cutoff: float = DEFAULT_CUTOFF,
            tail: str = "none"):
    """Product of phi_p over p <= prime_cutoff.

    tail='gaussian' multiplies in the Gaussian characteristic function of
    the omitted primes (exact covariance), approximating the full product.
    """
    X, Y, single = _points(point, len(specs))
    out = np.ones(X.shape[0], dtype=complex)
    for p in prime_table(prime_cutoff).upto(prime_cutoff):
        out *= phi_p(specs, sigma, int(p), (X, Y))
    if tail == "gaussian":
        out *= np.exp(tail_quadratic_form(specs, sigma, prime_cutoff, X, Y))
    elif tail != "none":
        raise ValueError("tail must be 'none' or 'gaussian'")
    return complex(out[0]) if single else out


# ------------------------------------------------------------- inversion

@dataclass(frozen=True)
class GridSpec:
    """Square window [-half_width, half_width)^{2J} sampled with n points per axis."""

    half_width: float = 8.0
    n: int = 64
    max_n: int = 1024

    def __post_init__(self):
        if self.n % 2 or self.n < 8:
            raise ValueError("n must be even and >= 8")


@dataclass
class DensityGrid:
    axes: list
    values: np.ndarray
    cell_mass: np.ndarray
    sigma: float
    prime_cutoff: float
    boundary_modulus: float
    imag_residue: float
    flags: list = field(default_factory=list)

    @property
    def spacing(self) -> float:
        return float(self.axes[0][1] - self.axes[0][0])

    def mass(self) -> float:
        return float(self.values.sum() * self.spacing ** self.values.ndim)

    def cell_edges(self, axis: int = 0) -> np.ndarray:
        a = self.axes[axis]
        return np.concatenate([a - 0.5 * self.spacing, [a[-1] + 0.5 * self.spacing]])

    def at(self, u) -> float:
        """Density value at the grid point nearest to u."""
        idx = tuple(int(np.argmin(np.abs(ax - ui))) for ax, ui in zip(self.axes, u))
        return float(self.values[idx])


def invert_density(specs: Sequence[LFunctionSpec], sigma: float, grid_spec: GridSpec | None = None,
                   prime_cutoff: float = DEFAULT_CUTOFF, tail: str = "none") -> DensityGrid:
    """Density of (log|L_j|, arg L_j) by discrete inverse Fourier transform of char_fn.

    The frequency step is 1/(2 W) for window half-width W, so the implied
    periodisation has period 2W. The number of points is doubled until
    |char_fn| < 1e-10 on the frequency boundary; InsufficientDecay is raised
    if it still exceeds 1e-6 at ``max_n``. ``cell_mass`` holds the exact
    integrals of the (periodised) density over the grid cells.
    """
    gs = grid_spec or GridSpec()
    J = len(specs)
    if J > 2:
        raise ValueError("inversion supports J <= 2")
    d = 2 * J
    h = 1.0 / (2 * gs.half_width)
    n = gs.n
    while True:
        k = (np.arange(n) - n // 2) * h
        mesh = np.meshgrid(*([k] * d), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        phi = char_fn(specs, sigma, (pts[:, :J], pts[:, J:]), prime_cutoff, tail).reshape([n] * d)
        shell = np.zeros([n] * d, dtype=bool)
        for ax in range(d):
            sl = [slice(None)] * d
            sl[ax] = 0
            shell[tuple(sl)] = True
        bmod = float(np.max(np.abs(phi[shell])))
        if bmod < 1e-10 or 2 * n > gs.max_n:
            break
        n *= 2
    if bmod > 1e-6:
        raise InsufficientDecay(f"|char_fn| = {bmod:.2e} on the frequency boundary")
    du = 2 * gs.half_width / n
    spec_ = np.fft.ifftshift(phi)
    H = np.fft.fftshift(np.fft.fftn(spec_)) * h**d
    sinc = np.sinc(k * du)
    weight = sinc
    for _ in range(d - 1):
        weight = np.multiply.outer(weight, sinc)
    cells = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(phi * weight))) * (h * du) ** d
    axes = [(np.arange(n) - n // 2) * du for _ in range(d)]
    flags = []
    if bmod >= 1e-10:
        flags.append(f"boundary modulus {bmod:.2e} above 1e-10")
    imag = float(np.max(np.abs(H.imag)))
    return DensityGrid(axes, H.real, cells.real, sigma, prime_cutoff, bmod, imag, flags)


# ---------------------------------------------------------- Gaussian model

@dataclass(frozen=True)
class GaussianModel:
    J: int
    xi: tuple
    G: float

    @property
    def logG(self) -> float:
        return float(np.log(self.G))

    def density(self, u, v) -> np.ndarray:
        u, v = np.atleast_2d(u), np.atleast_2d(v)
        xi = np.asarray(self.xi)
        L = self.logG
        norm_ = L ** (-self.J) / (np.pi ** self.J * prod(self.xi))
        return norm_ * np.exp(-np.sum((u**2 + v**2) / (xi * L), axis=-1))

    def charfn(self, x, y) -> np.ndarray:
        x, y = np.atleast_2d(x), np.atleast_2d(y)
        return np.exp(-np.pi**2 * self.logG * np.sum(np.asarray(self.xi) * (x**2 + y**2), axis=-1))


def gaussian_model(J: int, xi: Sequence[float], G: float) -> GaussianModel:
    if G < 4:
        raise ValueError("G >= 4 required")
    xi = tuple(float(v) for v in xi)
    if len(xi) != J:
        raise ValueError("need one xi per member")
    return GaussianModel(J, xi, float(G))


def gaussian_moment(l: Sequence[int], xi: Sequence[float]) -> float:
    """d_l = prod_j xi_j^{(l_j+1)/2} Gamma((l_j+1)/2), zero if some l_j is odd."""
    if any(int(a) % 2 for a in l):
        return 0.0
    return float(prod(x ** ((a + 1) / 2) * gamma((a + 1) / 2) for a, x in zip(l, xi)))


# ------------------------------------------------------------------- K0

@dataclass
class K0Result:
    value: float
    abs_error_estimate: float
    method: str
    J: int
    xi: tuple
    region_values: tuple = ()
    n_samples: int = 0
    flags: list = field(default_factory=list)


def k0_closed_form_J2(xi1: float, xi2: float) -> float:
    return float(np.sqrt(xi1 + xi2) / (8 * np.pi**1.5))


def _incomplete_moment(k: int, a: np.ndarray, xi: float) -> np.ndarray:
    """int_{-inf}^{a} u^k exp(-u^2/xi) du."""
    s = (k + 1) / 2
    c = 0.5 * xi**s * gamma(s)
    x = a**2 / xi
    sign = (-1) ** k
    return np.where(a >= 0, sign * c + c * gammainc(s, x), sign * c * gammaincc(s, x))


def _region_integrals(k_vec, xi, order):
    """For each n: int over {u_n = max} of exp(-sum u^2/xi) u_n u^k du."""
    x, w = np.polynomial.hermite.hermgauss(order)
    J = len(xi)
    out = []
    for n in range(J):
        u = np.sqrt(xi[n]) * x
        f = u ** (1 + k_vec[n])
        for j in range(J):
            if j != n:
                f = f * _incomplete_moment(k_vec[j], u, xi[j])
        out.append(float(np.sqrt(xi[n]) * np.sum(w * f)))
    return out


def _region_quadrature(k_vec, xi):
    lo = _region_integrals(k_vec, xi, 80)
    hi = _region_integrals(k_vec, xi, 120)
    err = abs(sum(hi) - sum(lo))
    return hi, err + 1e-15 * (abs(sum(hi)) + 1e-300)


def compute_K0(J: int, xi: Sequence[float], method: str = "quadrature", budget: int = 10**6,
               target_error: float | None = None, seed: int = 0, batch: int = 10**6) -> K0Result:
    """K0 = (1/(4 pi^{J/2+1} prod sqrt(xi))) sum_n int_{R_n} exp(-sum u^2/xi) u_n du.

    Quadrature reduces each region R_n = {u_n = max_j u_j} to a
    one-dimensional Gauss-Hermite integral whose integrand carries the
    error-function factors of the other coordinates. The Monte Carlo route
    uses the identity K0 = E[max_j U_j] / (4 pi), U_j ~ N(0, xi_j / 2), with
    antithetic pairs U, -U. For J = 1 the single region is the whole line
    and K0 = 0.
    """
    xi = tuple(float(v) for v in xi)
    if J < 1 or len(xi) != J or min(xi) <= 0:
        raise ValueError("need J >= 1 and J positive xi values")
    norm_ = 1.0 / (4 * np.pi ** (J / 2 + 1) * prod(np.sqrt(xi)))
    if method == "quadrature":
        regions, err = _region_quadrature([0] * J, xi)
        vals = tuple(norm_ * r for r in regions)
        res = K0Result(sum(vals), norm_ * err, "quadrature", J, xi, vals)
    elif method == "montecarlo":
        rng = np.random.default_rng(seed)
        sd = np.sqrt(np.asarray(xi) / 2)
        pair_sum = pair_sq = 0.0
        reg = np.zeros(J)
        n_pairs = budget // 2
        done = 0
        while done < n_pairs:
            m = min(batch, n_pairs - done)
            U = rng.standard_normal((m, J)) * sd
            hi = U.max(axis=1)
            lo = -U.min(axis=1)
            pm = 0.5 * (hi + lo)
            pair_sum += pm.sum()
            pair_sq += (pm**2).sum()
            arg_hi = U.argmax(axis=1)
            arg_lo = U.argmin(axis=1)
            reg += np.bincount(arg_hi, hi, J) + np.bincount(arg_lo, lo, J)
            done += m
        mean = pair_sum / n_pairs
        var = (pair_sq / n_pairs - mean**2) * n_pairs / (n_pairs - 1)
        se = np.sqrt(var / n_pairs)
        vals = tuple(reg / (2 * n_pairs) / (4 * np.pi))
        res = K0Result(mean / (4 * np.pi), se / (4 * np.pi), "montecarlo", J, xi, vals, 2 * n_pairs)
        if target_error is not None and res.abs_error_estimate > target_error:
            raise BudgetExhausted(
                f"error {res.abs_error_estimate:.2e} > target {target_error:.2e} after {budget} samples"
            )
    else:
        raise ValueError("method must be 'quadrature' or 'montecarlo'")
    if J == 1:
        res.flags.append("J = 1: the only region is the whole line, so K0 = 0")
    return res


def d1_constant(k_vec: Sequence[int], l_vec: Sequence[int], xi: Sequence[float]) -> float:
    """d_l * sum_n int_{R_n} exp(-sum u^2/xi) u_n u^k du (same region quadrature as K0)."""
    xi = tuple(float(v) for v in xi)
    dl = gaussian_moment(l_vec, xi)
    if dl == 0.0:
        return 0.0
    regions, _ = _region_quadrature([int(k) for k in k_vec], xi)
    return dl * sum(regions)


def predicted_increment(xi: Sequence[float], G: float) -> float:
    """Magnitude 2 pi K0 / (log G)^{3/2} of the leading increment term."""
    k0 = compute_K0(len(xi), xi).value
    return 2 * np.pi * k0 / np.log(G) ** 1.5
