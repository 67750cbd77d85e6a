"""L-functions of degree one: specs, combinations, evaluation, prime sums."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.special import exp1

from . import _kernels as K
from .characters import DirichletCharacter, dirichlet_character
from .errors import PoleError, PrecisionError, ZeroOnPathError
from .primes import PrimeTable, prime_table

TERM_CAP = 10**6
DEFAULT_PRECISION = 1e-12
SIGMA_FAR = 3.0  # |log L| <= log zeta(3) < 0.2 here, so the principal branch is the continuous one


@dataclass(frozen=True)
class LFunctionSpec:
    """One member L(s). ``kind`` is 'zeta', 'dirichlet' or 'synthetic'.

    Synthetic members wrap an arbitrary vectorised analytic function and are
    only meaningful for zero counting; they carry no Euler product.
    """

    kind: str
    character: DirichletCharacter | None = None
    degree: int = 1
    theta: float = 0.0
    xi: float = 1.0
    label: str = ""
    func: Callable | None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("zeta", "dirichlet", "synthetic"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "dirichlet" and self.character is None:
            raise ValueError("dirichlet spec needs a character")
        if self.kind == "synthetic" and self.func is None:
            raise ValueError("synthetic spec needs func")
        if not self.xi > 0:
            raise ValueError("xi must be positive")
        if not self.label:
            lab = {"zeta": "zeta", "synthetic": "synthetic"}.get(self.kind)
            object.__setattr__(self, "label", lab or f"L({self.character.label})")

    @property
    def modulus(self) -> int:
        return 1 if self.kind == "zeta" else self.character.modulus

    @property
    def chi_table(self) -> np.ndarray:
        if self.kind == "zeta":
            return np.ones(1, dtype=complex)
        if self.kind == "dirichlet":
            return np.asarray(self.character.values, dtype=complex)
        raise TypeError("synthetic spec has no Dirichlet coefficients")

    @property
    def principal(self) -> bool:
        return self.kind == "zeta" or (self.kind == "dirichlet" and self.character.is_principal)

    @property
    def primitive_key(self):
        """Two members with the same key have equal coefficients at all large primes."""
        if self.kind == "zeta" or (self.kind == "dirichlet" and self.character.is_principal):
            return ("principal",)
        return (self.character.modulus, self.character.exponents)

    def alpha(self, n):
        """Dirichlet (and Euler) coefficient; completely multiplicative in degree one."""
        return self.chi_table[np.asarray(n) % self.modulus]


def zeta_spec() -> LFunctionSpec:
    return LFunctionSpec("zeta")


def dirichlet_spec(q: int, exponents: Sequence[int] | None = None, xi: float = 1.0) -> LFunctionSpec:
    chi = dirichlet_character(q, None if exponents is None else tuple(exponents))
    return LFunctionSpec("dirichlet", chi, xi=xi)


def character_spec(chi: DirichletCharacter, xi: float = 1.0) -> LFunctionSpec:
    return LFunctionSpec("dirichlet", chi, xi=xi)


def synthetic_spec(func: Callable, label: str = "synthetic") -> LFunctionSpec:
    return LFunctionSpec("synthetic", func=func, label=label)


def euler_log_coeff(spec: LFunctionSpec, p: int, k: int) -> complex:
    """beta(p^k) = alpha(p)^k / k in degree one."""
    if k < 1:
        raise ValueError("k >= 1 required")
    return complex(spec.alpha(p)) ** k / k


# ------------------------------------------------------------ evaluation

def _as_array(s):
    arr = np.asarray(s, dtype=complex)
    return arr, arr.ndim == 0


def eval_L(spec: LFunctionSpec, s, precision: float = DEFAULT_PRECISION):
    """L(s) to absolute error ``precision`` for Re s > 0 (scalar or array)."""
    arr, scalar = _as_array(s)
    flat = arr.ravel()
    if spec.kind == "synthetic":
        out = np.asarray(spec.func(flat), dtype=complex)
    else:
        if np.any(flat.real <= 0):
            raise ValueError("evaluation requires Re(s) > 0")
        if spec.principal and np.any(flat == 1):
            raise PoleError("pole at s = 1")
        out, nused = K.lseries_many(
            flat, spec.modulus, spec.chi_table, float(precision), K.BERN_COEF,
            spec.principal, TERM_CAP,
        )
        if np.any(nused > TERM_CAP):
            raise PrecisionError(
                f"term count {int(nused.max())} exceeds cap {TERM_CAP} at precision {precision}"
            )
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def _ray_grid(sig, sig_far, n):
    u = np.linspace(0.0, 1.0, n + 1)
    return sig_far - (sig_far - sig) * (1 - (1 - u) ** 2)  # denser near sig


def eval_logL_many(spec: LFunctionSpec, sigma: float, ts, precision: float = DEFAULT_PRECISION,
                   floor: float = 1e-10, max_points: int = 4096):
    """log L(sigma + i t) for an array of t by horizontal-ray continuation.

    The argument is continued from Re s = SIGMA_FAR (where it is principal)
    leftwards; the sampling on each ray is doubled until successive argument
    increments are below pi/4. Raises ZeroOnPathError when |L| < floor on a ray.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    sig_far = max(SIGMA_FAR, sigma)
    out = np.empty(ts.shape, dtype=complex)
    pending = np.arange(ts.size)
    n = 16
    while pending.size:
        grid = _ray_grid(sigma, sig_far, n)
        pts = grid[None, :] + 1j * ts[pending, None]
        vals = eval_L(spec, pts, precision)
        absv = np.abs(vals)
        if np.any(absv < floor):
            i, j = np.argwhere(absv < floor)[0]
            raise ZeroOnPathError(f"|L| < {floor} on ray", point=complex(pts[i, j]))
        steps = np.angle(vals[:, 1:] / vals[:, :-1])
        ok = np.max(np.abs(steps), axis=1) < np.pi / 4
        rel = np.abs(np.diff(vals, axis=1)) / np.minimum(absv[:, 1:], absv[:, :-1])
        ok &= np.max(rel, axis=1) < 0.5
        done = pending[ok]
        arg = np.angle(vals[ok, 0]) + steps[ok].sum(axis=1)
        out[done] = np.log(absv[ok, -1]) + 1j * arg
        pending = pending[~ok]
        n *= 2
        if pending.size and n > max_points:
            raise ZeroOnPathError("ray sampling did not resolve the argument",
                                  point=complex(sigma, ts[pending[0]]))
    return out


def eval_logL(spec: LFunctionSpec, s: complex, precision: float = DEFAULT_PRECISION) -> complex:
    """log|L(s)| + i arg L(s), arg continued along the horizontal ray from +infinity."""
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError("eval_logL requires Re(s) > 1/2")
    return complex(eval_logL_many(spec, s.real, [s.imag], precision)[0])


# ---------------------------------------------------------- prime sums

def _powers_upto(p: np.ndarray, Y: float) -> np.ndarray:
    """Largest n with p^n <= Y, per prime (exact integer check)."""
    n = np.floor(np.log(Y) / np.log(p) + 1e-12).astype(np.int64)
    for i in range(p.size):
        while n[i] > 0 and int(p[i]) ** int(n[i]) > Y:
            n[i] -= 1
        while int(p[i]) ** int(n[i] + 1) <= Y:
            n[i] += 1
    return n


def dirichlet_poly(spec: LFunctionSpec, s, Y: float):
    """R_{L,Y}(s) = sum over prime powers p^n <= Y of beta(p^n) p^{-ns}."""
    if Y < 2:
        raise ValueError("Y >= 2 required")
    arr, scalar = _as_array(s)
    ps = prime_table(Y).upto(Y)
    kmax = _powers_upto(ps, Y)
    a = spec.alpha(ps)
    out = np.zeros(arr.shape, dtype=complex)
    logp = np.log(ps.astype(float))
    for n in range(1, int(kmax.max()) + 1):
        sel = kmax >= n
        coef = a[sel] ** n / n
        out += np.tensordot(np.exp(-n * np.multiply.outer(arr, logp[sel])), coef, axes=([-1], [0]))
    return complex(out) if scalar else out


def _table_for(x: float, table: PrimeTable | None) -> np.ndarray:
    return (table or prime_table(x)).upto(x)


def selberg_sum(spec_j: LFunctionSpec, spec_k: LFunctionSpec, x: float,
                table: PrimeTable | None = None) -> complex:
    """sum_{p <= x} beta_j(p) conj(beta_k(p)) / p."""
    if x < 2:
        raise ValueError("x >= 2 required")
    ps = _table_for(x, table)
    terms = spec_j.alpha(ps) * np.conj(spec_k.alpha(ps)) / ps
    return complex(np.sum(terms))


def prime_sum_2sigma(spec_j: LFunctionSpec, spec_k: LFunctionSpec, sigma: float,
                     cutoff: float, table: PrimeTable | None = None) -> complex:
    """sum_{p <= cutoff} beta_j(p) conj(beta_k(p)) p^{-2 sigma}, for 1/2 < sigma <= 1."""
    if not 0.5 < sigma <= 1:
        raise ValueError("need 1/2 < sigma <= 1")
    ps = _table_for(cutoff, table)
    terms = spec_j.alpha(ps) * np.conj(spec_k.alpha(ps)) * np.exp(-2 * sigma * np.log(ps))
    return complex(np.sum(terms))


def diagonal_prime_tail(sigma_sum: float, P: float) -> float:
    """Integral approximation of sum_{p > P} p^{-sigma_sum} (needs sigma_sum > 1).

    Uses the prime density 1/log u: the integral equals E1((sigma_sum - 1) log P).
    """
    return float(exp1((sigma_sum - 1.0) * np.log(P)))


@dataclass
class Soc2Fit:
    sigmas: np.ndarray
    values: np.ndarray
    model_log_term: np.ndarray
    constant: float
    slope: float

    def model(self) -> np.ndarray:
        return self.model_log_term + self.constant


def fit_soc2(spec_j: LFunctionSpec, spec_k: LFunctionSpec, sigmas: Sequence[float],
             cutoff: float, complete_tail: bool = True) -> Soc2Fit:
    """Compare prime_sum_2sigma with delta_jk xi log(1/(sigma - 1/2)) + constant.

    ``complete_tail`` adds the smooth estimate of primes beyond the cutoff on
    the diagonal so that the fitted slope reflects the full sum. The
    constant is a least-squares fit, never a claimed value.
    """
    sig = np.asarray(sigmas, dtype=float)
    vals = np.array([prime_sum_2sigma(spec_j, spec_k, s, cutoff).real for s in sig])
    diag = spec_j.primitive_key == spec_k.primitive_key
    if complete_tail and diag:
        vals = vals + np.array([diagonal_prime_tail(2 * s, cutoff) for s in sig])
    x = np.log(1.0 / (sig - 0.5))
    model = (spec_j.xi if diag else 0.0) * x
    const = float(np.mean(vals - model))
    slope = float(np.polyfit(x, vals, 1)[0]) if sig.size > 1 else float("nan")
    return Soc2Fit(sig, vals, model, const, slope)


# ------------------------------------------------------ linear combinations

N0_SEARCH = 10**4


@dataclass(frozen=True)
class LinearCombination:
    """F(s) = sum_j b_j L_j(s); weights are renormalised to unit l2 norm."""

    members: tuple
    weights: np.ndarray = field(compare=False)
    scale: float = field(compare=False)

    def __init__(self, members: Sequence[LFunctionSpec], weights: Sequence[float]):
        members = tuple(members)
        w = np.asarray(weights, dtype=float)
        if len(members) == 0 or len(members) != w.size:
            raise ValueError("need one nonzero weight per member")
        if np.any(w == 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonzero")
        scale = float(np.sqrt(np.sum(w**2)))
        w = w / scale
        w.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scale", scale)

    @property
    def J(self) -> int:
        return len(self.members)

    @property
    def xi(self) -> np.ndarray:
        return np.array([m.xi for m in self.members])

    def alpha(self, n):
        n = np.asarray(n)
        return sum(b * m.alpha(n) for b, m in zip(self.weights, self.members))

    @cached_property
    def n0(self) -> int:
        if any(m.kind == "synthetic" for m in self.members):
            raise TypeError("n0 undefined for synthetic members")
        ns = np.arange(1, N0_SEARCH + 1)
        nz = np.nonzero(np.abs(self.alpha(ns)) > 1e-12)[0]
        if nz.size == 0:
            raise ValueError(f"no nonzero coefficient up to {N0_SEARCH}")
        return int(ns[nz[0]])

    @property
    def leading_coeff(self) -> complex:
        return complex(self.alpha(self.n0))

    @property
    def label(self) -> str:
        return " + ".join(f"{b:.6g}*{m.label}" for b, m in zip(self.weights, self.members))


def single(spec: LFunctionSpec) -> LinearCombination:
    return LinearCombination([spec], [1.0])


def eval_F(comb: LinearCombination, s, precision: float = DEFAULT_PRECISION):
    """sum_j b_j L_j(s), each member to ``precision``."""
    arr, scalar = _as_array(s)
    out = np.zeros(arr.shape, dtype=complex)
    for b, m in zip(comb.weights, comb.members):
        out += b * eval_L(m, arr, precision)
    return complex(out) if scalar else out


def eval_L_tgrid(spec: LFunctionSpec, sigma: float, t0: float, dt: float, n: int,
                 precision: float = 1e-10, block: int = 512) -> np.ndarray:
    """L(sigma + i t) on the uniform grid t = t0 + k dt, k < n (fast path)."""
    if spec.kind == "synthetic":
        return eval_L(spec, sigma + 1j * (t0 + dt * np.arange(n)), precision)
    if sigma <= 0:
        raise ValueError("evaluation requires Re(s) > 0")
    out, nmax = K.lseries_tgrid(float(sigma), float(t0), float(dt), int(n), spec.modulus,
                                spec.chi_table, float(precision), K.BERN_COEF,
                                spec.principal, TERM_CAP, int(block))
    if nmax > TERM_CAP:
        raise PrecisionError(f"term count {nmax} exceeds cap {TERM_CAP}")
    if spec.principal and np.any(np.abs(sigma + 1j * (t0 + dt * np.arange(n)) - 1) == 0):
        raise PoleError("pole at s = 1")
    return out


def eval_F_tgrid(comb: LinearCombination, sigma: float, t0: float, dt: float, n: int,
                 precision: float = 1e-10) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    for b, m in zip(comb.weights, comb.members):
        out += b * eval_L_tgrid(m, sigma, t0, dt, n, precision)
    return out
