"""Random Euler products with unit-circle phases and Monte Carlo estimators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from . import _kernels as K
from .errors import TooManyRejections
from .lfunc import LFunctionSpec, LinearCombination, _powers_upto, diagonal_prime_tail
from .primes import prime_table

QUANTILES = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
TAIL_EXTENT = 10**7
TAIL_MODES = ("none", "factors", "gaussian")


def default_Y(sigma: float) -> float:
    """min(1e6, exp(4/(2 sigma - 1)))."""
    return float(min(1e6, np.exp(min(4.0 / (2 * sigma - 1), 700.0))))


@dataclass(frozen=True)
class PhaseAssignment:
    """Phases X(p) = exp(2 pi i u(seed, index, p)) from a counter-based hash.

    ``index`` selects one sample of the random model; ``override`` replaces
    the phase law by a fixed function of p (diagnostic use only).
    """

    seed: int
    index: int = 0
    antithetic: bool = False
    override: Callable | None = field(default=None, compare=False)

    def angles(self, primes) -> np.ndarray:
        ps = np.ascontiguousarray(np.atleast_1d(primes), dtype=np.int64)
        return K.phase_angles(np.uint64(self.seed % 2**64), self.index, ps, self.antithetic)

    def phase(self, p):
        ps = np.atleast_1d(p)
        if self.override is not None:
            vals = np.array([complex(self.override(int(q))) for q in ps])
        else:
            vals = np.exp(1j * self.angles(ps))
        return vals if np.ndim(p) else complex(vals[0])

    def phase_n(self, n: int) -> complex:
        from .primes import factorize

        out = 1 + 0j
        for p, a in factorize(int(n)).items():
            out *= self.phase(p) ** a
        return out

    @classmethod
    def constant(cls, value: complex = 1.0) -> "PhaseAssignment":
        return cls(0, override=lambda p: value)


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 10**5
    Y: float | None = None
    seed: int = 0
    antithetic: bool = False
    tail: str = "none"  # "none", "factors" or "gaussian"
    batch: int = 2048
    max_reject_frac: float = 1e-3

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples >= 1 required")
        if self.Y is not None and self.Y < 2:
            raise ValueError("Y >= 2 required")
        if self.tail not in TAIL_MODES:
            raise ValueError(f"tail must be one of {TAIL_MODES}")
        if self.antithetic and self.n_samples % 2:
            raise ValueError("antithetic sampling needs an even sample count")

    def resolve_Y(self, sigma: float) -> float:
        return float(self.Y) if self.Y is not None else default_Y(sigma)


@dataclass
class SampleStats:
    mean: float
    std_error: float
    n: int
    quantiles: dict
    rejected: int = 0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, x: np.ndarray, rejected: int = 0, pairs: bool = False, **meta):
        x = np.asarray(x, dtype=float)
        units = 0.5 * (x[0::2] + x[1::2]) if pairs else x
        n = units.size
        sd = float(np.std(units, ddof=1)) if n > 1 else float("inf")
        q = np.quantile(x, QUANTILES) if x.size else np.full(len(QUANTILES), np.nan)
        return cls(float(np.mean(x)), sd / np.sqrt(n), int(x.size),
                   {float(a): float(b) for a, b in zip(QUANTILES, q)}, rejected, meta)


@dataclass
class ProbEstimate:
    p: float
    ci_lo: float
    ci_hi: float
    n: int
    hits: int
    meta: dict = field(default_factory=dict)


def wilson(hits: int, n: int, level: float = 0.95) -> tuple[float, float]:
    z = norm.ppf(0.5 + level / 2)
    ph = hits / n
    den = 1 + z * z / n
    c = (ph + z * z / (2 * n)) / den
    h = z * np.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if hits == 0 else max(0.0, c - h)
    hi = 1.0 if hits == n else min(1.0, c + h)
    return lo, hi


# --------------------------------------------------------- single samples

def random_logL(spec: LFunctionSpec, sigma: float, phases: PhaseAssignment, Y: float) -> complex:
    """sum_{p^n <= Y} beta(p^n) X(p)^n p^{-n sigma} for one phase assignment."""
    if Y < 2:
        raise ValueError("Y >= 2 required")
    ps = prime_table(Y).upto(Y)
    kmax = _powers_upto(ps, Y)
    z = spec.alpha(ps) * phases.phase(ps) * np.exp(-sigma * np.log(ps))
    total = 0j
    zp = np.ones_like(z)
    for n in range(1, int(kmax.max()) + 1):
        zp = zp * z
        total += np.sum(np.where(kmax >= n, zp / n, 0))
    return complex(total)


def random_F(comb: LinearCombination, sigma: float, phases: PhaseAssignment, Y: float) -> complex:
    """sum_j b_j exp(random_logL_j); NaN when some Re log L_j > 700 (overflow guard)."""
    logs = [random_logL(m, sigma, phases, Y) for m in comb.members]
    if any(l.real > 700 for l in logs):
        return complex(np.nan, np.nan)
    return complex(sum(b * np.exp(l) for b, l in zip(comb.weights, logs)))


# ------------------------------------------------------------ batch engine

def tail_covariance(specs: Sequence[LFunctionSpec], sigmas: Sequence[float], Y: float,
                    extent: float = TAIL_EXTENT) -> np.ndarray:
    """Covariance E[W W^*] of the omitted prime sum over p > Y.

    Rows/columns are indexed (sigma index, member index). Primes in (Y, extent]
    are summed exactly (first and second powers); beyond ``extent`` the
    smooth prime density gives exp-integral terms for pairs of members with
    equal coefficients at large primes, and zero otherwise.
    """
    sig = np.asarray(sigmas, dtype=float)
    S, J = sig.size, len(specs)
    C = np.zeros((S * J, S * J), dtype=complex)
    if Y >= extent:
        ps = np.zeros(0, dtype=np.int64)
    else:
        ps = prime_table(extent).between(Y, extent)
    logp = np.log(ps.astype(float))
    alpha = np.array([m.alpha(ps) for m in specs])
    for a in range(S):
        for b in range(S):
            w1 = np.exp(-(sig[a] + sig[b]) * logp)
            w2 = w1 * w1
            for j in range(J):
                for k in range(J):
                    prod = alpha[j] * np.conj(alpha[k])
                    val = np.sum(prod * w1) + np.sum(prod * prod * w2) / 4
                    if specs[j].primitive_key == specs[k].primitive_key:
                        val += diagonal_prime_tail(sig[a] + sig[b], max(Y, extent))
                    C[a * J + j, b * J + k] = val
    return 0.5 * (C + C.conj().T)


def _tail_factor(C: np.ndarray) -> np.ndarray:
    lam, V = np.linalg.eigh(C)
    lam = np.clip(lam, 0.0, None)
    keep = lam > lam.max() * 1e-14 if lam.max() > 0 else lam > 0
    return np.ascontiguousarray(V[:, keep] * np.sqrt(lam[keep]))


def series_terms(r: np.ndarray, tol: float = 1e-17, max_terms: int = 24) -> np.ndarray:
    """Terms of the -log(1 - z) series needed at |z| = r; -1 where the series is too slow."""
    with np.errstate(divide="ignore"):
        m = np.ceil(np.log(tol) / np.log(r)).astype(np.int64)
    return np.where((m > max_terms) | (r >= 1), -1, np.maximum(m, 1))


def sample_logs(specs: Sequence[LFunctionSpec], sigmas: Sequence[float], cfg: MCConfig,
                start: int = 0, n: int | None = None) -> np.ndarray:
    """Random log L_j(sigma, X) for samples start..start+n-1: shape (n, S, J).

    tail='none' keeps prime powers p^n <= Y exactly as in the truncated
    Dirichlet polynomial. tail='factors' keeps whole local factors for
    p <= Y. tail='gaussian' does the same and adds a jointly Gaussian vector
    with the exact covariance of the omitted primes.
    """
    sig = np.asarray(sigmas, dtype=float)
    n = cfg.n_samples if n is None else n
    Y = cfg.resolve_Y(float(sig.min()))
    ps = prime_table(Y).upto(Y)
    rpow = np.exp(-np.outer(sig, np.log(ps.astype(float))))
    if cfg.tail in ("factors", "gaussian"):
        nterms = series_terms(rpow)
    else:
        nterms = np.broadcast_to(_powers_upto(ps, Y), rpow.shape)
    nterms = np.ascontiguousarray(nterms, dtype=np.int64)
    chi_p = np.ascontiguousarray(np.array([m.alpha(ps) for m in specs], dtype=complex))
    if cfg.tail == "gaussian":
        A = _tail_factor(tail_covariance(specs, sig, Y))
    else:
        A = np.zeros((sig.size * len(specs), 0), dtype=complex)
    A = np.ascontiguousarray(A.astype(complex))
    out = np.empty((n, sig.size, len(specs)), dtype=complex)
    seed = np.uint64(cfg.seed % 2**64)
    for b0 in range(0, n, cfg.batch):
        m = min(cfg.batch, n - b0)
        out[b0:b0 + m] = K.random_logs(seed, start + b0, m, ps, rpow, nterms, chi_p, A,
                                       cfg.antithetic)
    return out


def _log_abs_F(comb: LinearCombination, logs: np.ndarray):
    """log|F| per sample from (n, ..., J) logs, with a rejection mask."""
    over = np.any(logs.real > 700, axis=-1)
    safe = np.where(over[..., None], 0, logs)
    F = np.sum(comb.weights * np.exp(safe), axis=-1)
    absF = np.abs(F)
    bad = over | (absF < 1e-300)
    with np.errstate(divide="ignore"):
        return np.log(np.where(bad, 1.0, absF)), bad


def _check_rejections(bad_count: int, n: int, cfg: MCConfig):
    if bad_count > cfg.max_reject_frac * n:
        raise TooManyRejections(f"{bad_count} of {n} samples rejected")


def _meta(cfg: MCConfig, sigma_for_Y, **extra):
    return {"seed": cfg.seed, "Y": cfg.resolve_Y(float(np.min(sigma_for_Y))), "tail": cfg.tail,
            "antithetic": cfg.antithetic, **extra}


def mc_expect_logF(comb: LinearCombination, sigma: float, cfg: MCConfig) -> SampleStats:
    """Estimate of E log|F(sigma, X)|; samples with |F| < 1e-300 are rejected and counted."""
    if not sigma > 0.5:
        raise ValueError("sigma > 1/2 required")
    logs = sample_logs(comb.members, [sigma], cfg)[:, 0, :]
    la, bad = _log_abs_F(comb, logs)
    _check_rejections(int(bad.sum()), la.size, cfg)
    keep = ~bad
    if cfg.antithetic:
        keep = np.repeat(keep[0::2] & keep[1::2], 2)
    return SampleStats.from_values(la[keep], int(bad.sum()), pairs=cfg.antithetic,
                                   **_meta(cfg, sigma, sigma=sigma))


def increment_abscissas(G: float) -> tuple[float, float, float]:
    """sigma = 1/2 + 1/G and sigma_i = 1/2 + 1/G_i, G_{1,2} = G log G / (log G -+ 1)."""
    lg = np.log(G)
    return 0.5 + 1 / G, 0.5 + (lg - 1) / (G * lg), 0.5 + (lg + 1) / (G * lg)


@dataclass
class CoupledIncrement:
    G: float
    sigmas: tuple
    increments: tuple  # SampleStats for i = 1, 2


def coupled_increment(comb: LinearCombination, G: float, cfg: MCConfig,
                      force_equal: bool = False) -> CoupledIncrement:
    """log|F(sigma, X)| - log|F(sigma_i, X)| on shared phases, for i = 1, 2."""
    if G < 4:
        raise ValueError("G >= 4 required")
    s, s1, s2 = increment_abscissas(G)
    if force_equal:
        s1 = s2 = s
    logs = sample_logs(comb.members, [s, s1, s2], cfg)
    la, bad = _log_abs_F(comb, logs)
    bad = bad.any(axis=1)
    _check_rejections(int(bad.sum()), bad.size, cfg)
    keep = ~bad
    if cfg.antithetic:
        keep = np.repeat(keep[0::2] & keep[1::2], 2)
    incs = tuple(
        SampleStats.from_values(la[keep, 0] - la[keep, i], int(bad.sum()), pairs=cfg.antithetic,
                                **_meta(cfg, s1, i=i, sigma=s, sigma_i=(s1, s2)[i - 1]))
        for i in (1, 2)
    )
    return CoupledIncrement(G, (s, s1, s2), incs)


def moment_logF(comb: LinearCombination, sigma: float, k: int, cfg: MCConfig) -> SampleStats:
    """Estimate of E |log|F(sigma, X)||^{2k}, k <= 5."""
    if not 0 <= k <= 5:
        raise ValueError("0 <= k <= 5 required")
    if k == 0:
        return SampleStats(1.0, 0.0, cfg.n_samples, {q: 1.0 for q in QUANTILES},
                           meta=_meta(cfg, sigma, k=0))
    logs = sample_logs(comb.members, [sigma], cfg)[:, 0, :]
    la, bad = _log_abs_F(comb, logs)
    _check_rejections(int(bad.sum()), la.size, cfg)
    return SampleStats.from_values(np.abs(la[~bad]) ** (2 * k), int(bad.sum()),
                                   **_meta(cfg, sigma, k=k))


def tail_prob(spec: LFunctionSpec, sigma: float, tau: float, cfg: MCConfig) -> ProbEstimate:
    """P(|log L(sigma, X)| > tau) with a 95% Wilson interval."""
    if tau < 0:
        raise ValueError("tau >= 0 required")
    logs = sample_logs([spec], [sigma], cfg)[:, 0, 0]
    hits = int(np.count_nonzero(np.abs(logs) > tau))
    lo, hi = wilson(hits, logs.size)
    return ProbEstimate(hits / logs.size, lo, hi, logs.size, hits, _meta(cfg, sigma, tau=tau))


def tail_prob_curve(spec: LFunctionSpec, sigma: float, taus, cfg: MCConfig) -> list:
    """tail_prob for many thresholds from one set of samples."""
    a = np.abs(sample_logs([spec], [sigma], cfg)[:, 0, 0])
    out = []
    for tau in taus:
        hits = int(np.count_nonzero(a > tau))
        out.append(ProbEstimate(hits / a.size, *wilson(hits, a.size), a.size, hits,
                                _meta(cfg, sigma, tau=float(tau))))
    return out


def concentration_prob(comb: LinearCombination, sigma: float, M: float, R: float, eps: float,
                       cfg: MCConfig) -> ProbEstimate:
    """P(L(sigma, X) in [-M, M]^{2J} and R < |F(sigma, X)| < R + eps)."""
    if not eps > 0:
        raise ValueError("eps > 0 required")
    if not M > 2 * np.pi:
        raise ValueError("M > 2 pi required")
    logs = sample_logs(comb.members, [sigma], cfg)[:, 0, :]
    inbox = np.all((np.abs(logs.real) <= M) & (np.abs(logs.imag) <= M), axis=1)
    F = np.abs(np.sum(comb.weights * np.exp(np.where(inbox[:, None], logs, 0)), axis=1))
    hits = int(np.count_nonzero(inbox & (F > R) & (F < R + eps)))
    lo, hi = wilson(hits, logs.shape[0])
    return ProbEstimate(hits / logs.shape[0], lo, hi, logs.shape[0], hits,
                        _meta(cfg, sigma, M=M, R=R, eps=eps))


# ------------------------------------------------------------ diagnostics

def prime_power_sq_sum(spec: LFunctionSpec, sigma: float, Y: float, Y2: float) -> float:
    """sum over Y < p^n <= Y2 of |beta(p^n)|^2 p^{-2 n sigma} (exact)."""
    ps = prime_table(Y2).upto(Y2)
    k_lo, k_hi = _powers_upto(ps, Y), _powers_upto(ps, Y2)
    a2 = np.abs(spec.alpha(ps)) ** 2
    total = 0.0
    for n in range(1, int(k_hi.max()) + 1):
        sel = (k_hi >= n) & (k_lo < n)
        total += float(np.sum(a2[sel] ** n * np.exp(-2 * n * sigma * np.log(ps[sel]))) / n**2)
    return total


@dataclass
class VarianceCheck:
    sample_var: float
    std_error: float
    exact: float

    @property
    def z(self) -> float:
        return (self.sample_var - self.exact) / self.std_error


def truncation_variance_check(spec: LFunctionSpec, sigma: float, Y: float, Y2: float,
                              cfg: MCConfig) -> VarianceCheck:
    """Var(random_logL(Y2) - random_logL(Y)) on shared phases vs the exact prime-power sum."""
    c1 = MCConfig(cfg.n_samples, Y, cfg.seed, cfg.antithetic, "none", cfg.batch)
    c2 = MCConfig(cfg.n_samples, Y2, cfg.seed, cfg.antithetic, "none", cfg.batch)
    d = sample_logs([spec], [sigma], c2)[:, 0, 0] - sample_logs([spec], [sigma], c1)[:, 0, 0]
    dev = np.abs(d - d.mean()) ** 2
    n = d.size
    var = float(np.sum(dev) / (n - 1))
    se = float(np.std(dev, ddof=1) / np.sqrt(n))
    return VarianceCheck(var, se, prime_power_sq_sum(spec, sigma, Y, Y2))
