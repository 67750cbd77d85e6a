"""Independent reference computations.

Nothing here calls the evaluation internals of lfzeros. Where an oracle
needs L-values it goes through mpmath or plain numpy sums. The frozen
outputs live in oracle_values.py (regenerate with scripts/freeze_oracles.py).
"""
from __future__ import annotations

import cmath
import math

import mpmath as mp
import numpy as np
from scipy import integrate


def plain_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.nonzero(flags)[0]


def chi4(n):
    n = np.asarray(n)
    return np.where(n % 2 == 0, 0, np.where(n % 4 == 1, 1, -1))


def catalan_alternating() -> float:
    """sum (-1)^n / (2n+1)^2, averaging consecutive partial sums to kill the oscillation."""
    n = np.arange(2_000_000)
    terms = (-1.0) ** n / (2 * n + 1.0) ** 2
    s = np.cumsum(terms)
    est = 0.5 * (s[-1] + s[-2])
    return float(est)


def first_zeta_zero_ordinate() -> float:
    """Bisection on a sign change of Hardy's Z function (mpmath.siegelz) near t = 14."""
    ts = np.arange(13.0, 15.0, 0.01)
    z = [float(mp.siegelz(t)) for t in ts]
    k = next(i for i in range(len(z) - 1) if z[i] * z[i + 1] < 0)
    a, b = ts[k], ts[k + 1]
    fa = z[k]
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = float(mp.siegelz(m))
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def mp_dirichlet_L(s: complex, q: int, table) -> complex:
    """L(s, chi) by mpmath's Hurwitz-zeta route; ``table`` lists chi(0..q-1)."""
    mp.mp.dps = 30
    return complex(mp.dirichlet(mp.mpc(s.real, s.imag), list(table)))


def arg_by_log_derivative(L, sigma: float, t: float, far: float = 40.0, h: float = 1e-5) -> float:
    """arg L(sigma + it) = -Im int_sigma^far L'/L(u + it) du + arg L(far + it).

    L' by central differences; the integral by scipy's adaptive quad.
    """
    def integrand(u):
        s = complex(u, t)
        d = (L(s + h) - L(s - h)) / (2 * h)
        return (d / L(s)).imag

    val, err = integrate.quad(integrand, sigma, far, limit=400, epsabs=1e-11, epsrel=1e-11)
    return -val + cmath.phase(L(complex(far, t)))


def mertens_sum(x: float) -> float:
    p = plain_sieve(int(x))
    return float(np.sum(1.0 / p))


def characters_mod_prime(q: int, g: int):
    """All characters mod prime q from primitive root g: chi_k(g^m) = e(km/(q-1))."""
    dlog = {pow(g, m, q): m for m in range(q - 1)}
    out = []
    for k in range(q - 1):
        tab = [0j] * q
        for a, m in dlog.items():
            tab[a] = cmath.exp(2j * math.pi * k * m / (q - 1))
        out.append(tab)
    return out


def pair_prime_sum(tab1, tab2, q: int, x: float) -> complex:
    p = plain_sieve(int(x))
    a = np.array(tab1)[p % q]
    b = np.array(tab2)[p % q]
    return complex(np.sum(a * np.conj(b) / p))


def phase_tracking_count(f, rect, step: float = 1e-3) -> int:
    """Brute-force argument principle: walk the boundary at fixed step, summing
    principal-value phase increments. Asserts each increment is below pi/2."""
    s0, s1, t0, t1 = rect
    corners = [complex(s0, t0), complex(s1, t0), complex(s1, t1), complex(s0, t1), complex(s0, t0)]
    total = 0.0
    for a, b in zip(corners[:-1], corners[1:]):
        n = max(2, int(math.ceil(abs(b - a) / step)))
        z = a + (b - a) * np.linspace(0, 1, n + 1)
        v = f(z)
        d = np.angle(v[1:] / v[:-1])
        if np.max(np.abs(d)) >= np.pi / 2:
            raise RuntimeError("phase step too large; refine the oracle step")
        total += d.sum()
    w = total / (2 * math.pi)
    k = int(round(w))
    assert abs(w - k) < 1e-6, w
    return k


def prime_power_variance(sigma: float, Y: float, Y2: float = None) -> float:
    """sum over p^n <= Y (or Y < p^n <= Y2) of p^{-2 n sigma} / n^2 for zeta."""
    top = Y2 if Y2 is not None else Y
    lo = Y if Y2 is not None else 1
    total = 0.0
    for p in plain_sieve(int(top)):
        n, pn = 1, int(p)
        while pn <= top:
            if pn > lo:
                total += float(p) ** (-2 * n * sigma) / n**2
            n += 1
            pn *= int(p)
    return total


def phi_second_derivative_fd(phi, h: float = 1e-3) -> float:
    """Central second difference at 0 for a real-valued even function."""
    return (phi(h) - 2 * phi(0.0) + phi(-h)) / h**2


def gaussian_moment_quad(l, xi) -> float:
    out = 1.0
    for lj, xj in zip(l, xi):
        v, _ = integrate.quad(lambda u: u**lj * math.exp(-u * u / xj), -np.inf, np.inf,
                              epsabs=1e-13, epsrel=1e-13)
        out *= v
    return out


def fourier_direct(f, ys, L: float = 400.0, n: int = 10**5 + 1) -> np.ndarray:
    """int f(x) e^{-2 pi i x y} dx over [-L, L] by composite Simpson on n nodes."""
    x = np.linspace(-L, L, n)
    fx = f(x)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    h = x[1] - x[0]
    return np.array([h / 3 * np.sum(w * fx * np.exp(-2j * np.pi * x * y)) for y in ys])


def von_mangoldt_poly(s: complex, Y: float) -> complex:
    """sum_{2 <= n <= Y} Lambda(n) / (log n) n^{-s}, Lambda from mpmath."""
    n = np.arange(2, int(Y) + 1)
    lam = np.array([float(mp.mangoldt(int(k))) for k in n])
    keep = lam > 0
    n, lam = n[keep], lam[keep]
    return complex(np.sum(lam / np.log(n) * np.exp(-s * np.log(n))))
