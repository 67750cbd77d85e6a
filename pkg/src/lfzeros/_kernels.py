"""Numba kernels for the hot loops (series evaluation, random products)."""
from __future__ import annotations

import math

import numba as nb
import numpy as np
from scipy.special import bernoulli, factorial

EM_ORDER = 10  # Bernoulli terms B_2 .. B_20
_B = bernoulli(2 * EM_ORDER)
BERN_COEF = np.array([_B[2 * j] / factorial(2 * j, exact=False) for j in range(1, EM_ORDER + 1)])


@nb.njit(cache=True)
def em_terms_needed(s, q, weight, prec, M):
    """Smallest N with the Euler-Maclaurin remainder below prec.

    Uses |R_M| <= 4 |(s)_{2M}| / (2 pi)^{2M} * N^{1 - sigma - 2M} / (sigma + 2M - 1),
    multiplied by ``weight`` (sum of |chi(a)| q^-sigma over residues).
    """
    sig = s.real
    poch = 1.0
    for k in range(2 * M):
        poch *= abs(s + k)
    expo = sig + 2 * M - 1
    rhs = 4.0 * poch * weight / ((2 * math.pi) ** (2 * M) * expo * prec)
    if rhs <= 1.0:
        return 20
    n = math.exp(math.log(rhs) / expo)
    return max(20, int(math.ceil(n)) + 1)


@nb.njit(cache=True)
def em_tail(s, q, chi, N, bern, principal):
    """q^-s sum_a chi(a) [Euler-Maclaurin tail of zeta(s, a/q) beyond N terms]."""
    M = bern.shape[0]
    tail = 0j
    sm1 = s - 1.0
    for a in range(1, q + 1):
        c = chi[a % q]
        if c.real == 0.0 and c.imag == 0.0:
            continue
        x = N + a / q
        lx = math.log(x)
        xs = np.exp(-s * lx)  # x^-s
        if principal:
            integ = x * xs / sm1
        else:
            # (x^{1-s} - 1)/(s-1); the constant cancels because sum chi(a) = 0
            w = -sm1 * lx
            if abs(w) < 1e-5:
                integ = -lx * (1.0 + w / 2.0 + w * w / 6.0)
            else:
                integ = (np.exp(w) - 1.0) / sm1
        term = integ + 0.5 * xs
        poch = s
        xp = xs / x
        for j in range(M):
            term += bern[j] * poch * xp
            poch *= (s + 2 * j + 1) * (s + 2 * j + 2)
            xp /= x * x
        tail += c * term
    return np.exp(-s * math.log(q)) * tail


@nb.njit(cache=True)
def lseries_one(s, q, chi, N, bern, principal):
    """L(s, chi) = sum_{n <= qN} chi(n) n^-s + q^-s sum_a chi(a) EM-tail(s, a/q, N)."""
    sig = s.real
    t = s.imag
    acc_re = 0.0
    acc_im = 0.0
    for n in range(1, q * N + 1):
        c = chi[n % q]
        if c.real == 0.0 and c.imag == 0.0:
            continue
        lx = math.log(n)
        mag = math.exp(-sig * lx)
        cr = mag * math.cos(t * lx)
        ci = -mag * math.sin(t * lx)
        acc_re += c.real * cr - c.imag * ci
        acc_im += c.real * ci + c.imag * cr
    return complex(acc_re, acc_im) + em_tail(s, q, chi, N, bern, principal)


@nb.njit(cache=True)
def lseries_many(svals, q, chi, prec, bern, principal, cap):
    out = np.empty(svals.shape[0], dtype=np.complex128)
    nused = np.empty(svals.shape[0], dtype=np.int64)
    weight0 = 0.0
    for a in range(1, q + 1):
        weight0 += abs(chi[a % q])
    for i in range(svals.shape[0]):
        s = svals[i]
        w = weight0 * math.exp(-s.real * math.log(q))
        N = em_terms_needed(s, q, w, prec, bern.shape[0])
        nused[i] = N
        if N > cap:
            out[i] = complex(np.nan, np.nan)
            continue
        out[i] = lseries_one(s, q, chi, N, bern, principal)
    return out, nused


# ----------------------------------------------------------------- phases

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


@nb.njit(cache=True)
def mix64(x):
    x = x + _GOLD
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@nb.njit(cache=True)
def sample_key(seed, index):
    return mix64(mix64(np.uint64(seed)) ^ np.uint64(index))


@nb.njit(cache=True)
def unit_uniform(key, counter):
    """Uniform in [0, 1) from (key, counter), 53-bit resolution."""
    z = mix64(key ^ mix64(np.uint64(counter)))
    return float(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@nb.njit(cache=True)
def phase_angles(seed, index, primes, antithetic):
    key = sample_key(seed, index // 2 if antithetic else index)
    # the antithetic partner takes X(p) -> -X(p)
    shift = math.pi if (antithetic and index % 2 == 1) else 0.0
    out = np.empty(primes.shape[0])
    for k in range(primes.shape[0]):
        out[k] = 2.0 * math.pi * unit_uniform(key, primes[k]) + shift
    return out


@nb.njit(cache=True)
def std_normals(seed, index, n, antithetic):
    """n iid complex normals with E|Z|^2 = 1 (Box-Muller on hashed uniforms)."""
    key = sample_key(seed ^ np.uint64(0x5DEECE66D), index // 2 if antithetic else index)
    sign = -1.0 if (antithetic and index % 2 == 1) else 1.0
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        u1 = unit_uniform(key, 2 * k)
        u2 = unit_uniform(key, 2 * k + 1)
        r = math.sqrt(-math.log(1.0 - u1))  # |Z|^2 ~ Exp(1)
        th = 2.0 * math.pi * u2
        out[k] = complex(sign * r * math.cos(th), sign * r * math.sin(th))
    return out


# ------------------------------------------------------- random products

@nb.njit(cache=True)
def random_logs(seed, start, n_samples, primes, rpow, nterms, chi_p, tail_factor, antithetic):
    """Random log L values for samples start .. start + n_samples - 1.

    rpow: (S, P) array of p^-sigma; chi_p: (J, P) values alpha_j(p); nterms:
    (S, P) number of prime powers kept per prime, -1 meaning the whole local
    factor -log(1 - z). ``tail_factor`` is an (S*J, R)
    matrix A so that the Gaussian tail vector is A Z (R may be 0).
    Returns an (n, S, J) complex array.
    """
    J = chi_p.shape[0]
    S = rpow.shape[0]
    P = primes.shape[0]
    R = tail_factor.shape[1]
    out = np.zeros((n_samples, S, J), dtype=np.complex128)
    inv = np.zeros(nterms.max() + 2)
    for m in range(1, inv.shape[0]):
        inv[m] = 1.0 / m
    for i in range(n_samples):
        idx = start + i
        ang = phase_angles(seed, idx, primes, antithetic)
        for k in range(P):
            xr = math.cos(ang[k])
            xi = math.sin(ang[k])
            for j in range(J):
                c = chi_p[j, k]
                if c.real == 0.0 and c.imag == 0.0:
                    continue
                ur = c.real * xr - c.imag * xi
                ui = c.real * xi + c.imag * xr
                for a in range(S):
                    r = rpow[a, k]
                    nt = nterms[a, k]
                    if nt < 0:
                        out[i, a, j] += -np.log(1.0 - complex(r * ur, r * ui))
                        continue
                    # Horner evaluation of sum_{m <= nt} z^m / m
                    zr = r * ur
                    zi = r * ui
                    accr = inv[nt]
                    acci = 0.0
                    for m in range(nt - 1, 0, -1):
                        tr = accr * zr - acci * zi + inv[m]
                        acci = accr * zi + acci * zr
                        accr = tr
                    out[i, a, j] += complex(accr * zr - acci * zi, accr * zi + acci * zr)
        if R > 0:
            zs = std_normals(seed, idx, R, antithetic)
            for a in range(S):
                for j in range(J):
                    row = a * J + j
                    acc = 0j
                    for r_ in range(R):
                        acc += tail_factor[row, r_] * zs[r_]
                    out[i, a, j] += acc
    return out


@nb.njit(cache=True)
def lseries_tgrid(sigma, t0, dt, n_t, q, chi, prec, bern, principal, cap, block):
    """L(sigma + i(t0 + k dt)) for k < n_t via phase recurrences in t.

    Head terms n^{-i t} are advanced by multiplication with n^{-i dt} and
    reseeded at every block start, so drift stays at the 1e-13 level.
    """
    out = np.empty(n_t, dtype=np.complex128)
    maxN = 0
    weight0 = 0.0
    for a in range(1, q + 1):
        weight0 += abs(chi[a % q])
    w = weight0 * math.exp(-sigma * math.log(q))
    M = bern.shape[0]
    for b0 in range(0, n_t, block):
        b1 = min(n_t, b0 + block)
        t_hi = t0 + (b1 - 1) * dt
        N = em_terms_needed(complex(sigma, max(abs(t_hi), abs(t0 + b0 * dt))), q, w, prec, M)
        if N > cap:
            return out, N
        maxN = max(maxN, N)
        acc = np.zeros(b1 - b0, dtype=np.complex128)
        tb = t0 + b0 * dt
        for n in range(1, q * N + 1):
            c = chi[n % q]
            if c.real == 0.0 and c.imag == 0.0:
                continue
            lx = math.log(n)
            mag = math.exp(-sigma * lx)
            term = c * mag * complex(math.cos(tb * lx), -math.sin(tb * lx))
            step = complex(math.cos(dt * lx), -math.sin(dt * lx))
            for k in range(b1 - b0):
                acc[k] += term
                term *= step
        for k in range(b1 - b0):
            s = complex(sigma, t0 + (b0 + k) * dt)
            out[b0 + k] = acc[k] + em_tail(s, q, chi, N, bern, principal)
    return out, maxN
