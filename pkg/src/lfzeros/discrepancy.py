"""Empirical distribution of (log|L_j|, arg L_j) on vertical segments, box
discrepancy against the random model, and Beurling-Selberg functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import polygamma

from .errors import QuadratureError, ZeroOnPathError
from .lfunc import LinearCombination, eval_L_tgrid, eval_logL_many
from .quadrature import gl_nodes
from .random_model import MCConfig, sample_logs


@dataclass
class EmpiricalDistribution:
    """Samples are rows (log|L_1|, ..., log|L_J|, arg L_1, ..., arg L_J)."""

    samples: np.ndarray
    sigma: float
    T: float
    grid_step: float
    skipped: int = 0
    ts: np.ndarray | None = None
    flags: list = field(default_factory=list)

    @property
    def J(self) -> int:
        return self.samples.shape[1] // 2


def _unwrap_vertical(spec, sigma, ts, vals, precision, depth=0):
    """Argument increments between successive grid values, refining large steps."""
    steps = np.angle(vals[1:] / vals[:-1])
    bad = np.nonzero(np.abs(steps) > np.pi / 2)[0]
    for i in bad:
        if depth > 20:
            raise ZeroOnPathError("vertical unwrap not resolved", complex(sigma, ts[i]))
        sub_t = np.linspace(ts[i], ts[i + 1], 17)
        sub_v = np.asarray(eval_L_tgrid(spec, sigma, sub_t[0], sub_t[1] - sub_t[0], 17, precision))
        steps[i] = _unwrap_vertical(spec, sigma, sub_t, sub_v, precision, depth + 1).sum()
    return steps


def _ray_args(spec, sigma, ts, precision):
    """Ray-continued log L at each t; t is perturbed by 1e-9 once on failure.

    Returns values and a mask of points that still failed.
    """
    out = np.full(ts.size, np.nan + 0j)
    try:
        return eval_logL_many(spec, sigma, ts, precision), np.zeros(ts.size, bool)
    except ZeroOnPathError:
        pass
    failed = np.zeros(ts.size, bool)
    for i, t in enumerate(ts):
        for dt in (0.0, 1e-9):
            try:
                out[i] = eval_logL_many(spec, sigma, [t + dt], precision)[0]
                break
            except ZeroOnPathError:
                continue
        else:
            failed[i] = True
    return out, failed


def _member_logs(spec, sigma, ts, step, precision, anchor_every, flags):
    n = ts.size
    vals = eval_L_tgrid(spec, sigma, ts[0], step, n, precision)
    logabs = np.log(np.abs(vals))
    steps = _unwrap_vertical(spec, sigma, ts, vals, precision)
    arg = np.empty(n)
    failed = np.zeros(n, bool)
    anchors = list(range(0, n, anchor_every))
    if anchors[-1] != n - 1:
        anchors.append(n - 1)
    ray, bad = _ray_args(spec, sigma, ts[anchors], precision)
    for a0, a1, r0, r1, b0, b1 in zip(anchors[:-1], anchors[1:], ray[:-1], ray[1:], bad[:-1], bad[1:]):
        seg = slice(a0, a1 + 1)
        cont = r0.imag + np.concatenate([[0.0], np.cumsum(steps[a0:a1])])
        if not (b0 or b1) and abs(cont[-1] - r1.imag) < 1e-6:
            arg[seg] = cont
            continue
        # a zero lies right of the segment (or an anchor failed): use rays throughout
        flags.append(f"{spec.label}: ray fallback on t in [{ts[a0]:.6g}, {ts[a1]:.6g}]")
        r, f = _ray_args(spec, sigma, ts[seg], precision)
        arg[seg] = r.imag
        failed[seg] |= f
    return logabs, arg, failed


def sample_L_vector(comb: LinearCombination, sigma: float, T: float, grid_step: float = 0.1,
                    precision: float = 1e-9, offset: float = 0.5,
                    anchor_spacing: float = 10.0) -> EmpiricalDistribution:
    """(log|L_j|, arg L_j)(sigma + i t) on t = T + (k + offset) grid_step, k < T / grid_step.

    Arguments follow the horizontal-ray convention. They are obtained by
    continuing vertically along the grid between anchor points (spaced
    ``anchor_spacing`` apart) where the ray value is computed directly; a
    mismatch at the next anchor means a zero sits to the right of that
    stretch, and the stretch is then recomputed ray by ray.
    """
    if grid_step > 0.1:
        raise ValueError("grid_step <= 0.1 required")
    n = int(np.floor(T / grid_step + 1e-9))
    ts = T + (np.arange(n) + offset) * grid_step
    flags: list = []
    every = max(1, int(round(anchor_spacing / grid_step)))
    cols_abs, cols_arg, failed = [], [], np.zeros(n, bool)
    for m in comb.members:
        la, ar, f = _member_logs(m, sigma, ts, grid_step, precision, every, flags)
        cols_abs.append(la)
        cols_arg.append(ar)
        failed |= f
    samples = np.column_stack(cols_abs + cols_arg)
    keep = ~failed & np.all(np.isfinite(samples), axis=1)
    return EmpiricalDistribution(samples[keep], sigma, T, grid_step, int(n - keep.sum()), ts[keep], flags)


@dataclass
class ReferenceSample:
    """Random-model draws of the same 2J-vector."""

    samples: np.ndarray
    sigma: float
    cfg: MCConfig


def random_reference(comb: LinearCombination, sigma: float, n: int, seed: int = 0,
                     Y: float = 1e4, tail: str = "gaussian") -> ReferenceSample:
    cfg = MCConfig(n_samples=int(n), Y=Y, seed=seed, tail=tail)
    logs = sample_logs(comb.members, [sigma], cfg)[:, 0, :]
    return ReferenceSample(np.column_stack([logs.real, logs.imag]), sigma, cfg)


# --------------------------------------------------------------- boxes

@dataclass(frozen=True)
class RectFamily:
    """All boxes whose sides run between consecutive-or-not breakpoints (plus +-inf)."""

    breakpoints: tuple

    def __post_init__(self):
        bps = tuple(np.asarray(b, dtype=float) for b in self.breakpoints)
        for b in bps:
            if np.any(np.diff(b) <= 0):
                raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)

    @property
    def dim(self) -> int:
        return len(self.breakpoints)

    def extended(self, axis: int) -> np.ndarray:
        return np.concatenate([[-np.inf], self.breakpoints[axis], [np.inf]])

    @property
    def n_boxes(self) -> int:
        return int(np.prod([(len(b) + 2) * (len(b) + 1) // 2 for b in self.breakpoints]))

    @classmethod
    def from_quantiles(cls, samples: np.ndarray, k: int = 9) -> "RectFamily":
        q = np.arange(1, k + 1) / (k + 1)
        return cls(tuple(np.unique(np.quantile(samples[:, i], q)) for i in range(samples.shape[1])))


def _cumulative(samples: np.ndarray, fam: RectFamily) -> np.ndarray:
    """C[i_1..i_d] = fraction of samples below breakpoint i_k on every axis."""
    d = fam.dim
    idx = [np.searchsorted(fam.breakpoints[a], samples[:, a], side="right") for a in range(d)]
    shape = [len(b) + 1 for b in fam.breakpoints]
    hist = np.zeros(shape)
    np.add.at(hist, tuple(idx), 1.0)
    for a in range(d):
        hist = np.cumsum(hist, axis=a)
    C = np.zeros([s + 1 for s in shape])
    C[tuple(slice(1, None) for _ in range(d))] = hist
    return C / samples.shape[0]


def box_masses(samples: np.ndarray, fam: RectFamily):
    """Mass of every box (lo_k, hi_k] in the family; returns (masses, index pairs per axis)."""
    C = _cumulative(samples, fam)
    pairs = []
    for b in fam.breakpoints:
        m = len(b) + 2
        lo, hi = np.triu_indices(m, 1)
        pairs.append((lo, hi))
    d = fam.dim
    out = 0.0
    for corner in range(2**d):
        sel, sign = [], 1
        for a in range(d):
            if corner >> a & 1:
                sel.append(pairs[a][1])
            else:
                sel.append(pairs[a][0])
                sign = -sign
        out = out + sign * C[np.ix_(*sel)]
    return out, pairs


@dataclass
class DiscrepancyResult:
    value: float
    box: list  # (lo, hi) per axis
    n_boxes: int
    n_empirical: int
    n_reference: int


def box_discrepancy(a: np.ndarray, b: np.ndarray, fam: RectFamily) -> DiscrepancyResult:
    ma, pairs = box_masses(a, fam)
    mb, _ = box_masses(b, fam)
    diff = np.abs(ma - mb)
    k = np.unravel_index(int(np.argmax(diff)), diff.shape)
    box = []
    for ax, (lo, hi) in enumerate(pairs):
        ext = fam.extended(ax)
        box.append((float(ext[lo[k[ax]]]), float(ext[hi[k[ax]]])))
    return DiscrepancyResult(float(diff[k]), box, int(diff.size), a.shape[0], b.shape[0])


def sup_box_discrepancy(emp, comb: LinearCombination, rect_family: RectFamily | None = None,
                        mc_budget: int = 2 * 10**5, seed: int = 0,
                        reference: ReferenceSample | np.ndarray | None = None) -> DiscrepancyResult:
    """max over the box family of |Phi_T(box) - Phi_rand(box)|, both as sample fractions.

    ``emp`` may be an EmpiricalDistribution or a raw (n, 2J) array. Without
    an explicit reference, ``mc_budget`` random-model samples are drawn at
    the same sigma. The default family uses 9 quantile breakpoints per axis
    of the reference sample.
    """
    a = emp.samples if hasattr(emp, "samples") else np.asarray(emp)
    if reference is None:
        reference = random_reference(comb, emp.sigma, mc_budget, seed)
    b = reference.samples if hasattr(reference, "samples") else np.asarray(reference)
    fam = rect_family or RectFamily.from_quantiles(b)
    return box_discrepancy(a, b, fam)


def default_box_L(xi_max: float, sigma: float) -> float:
    """3 sqrt(xi_max log G) with G = 1/(sigma - 1/2)."""
    return float(3 * np.sqrt(xi_max * np.log(1 / (sigma - 0.5))))


def tail_distribution_Psi(source, comb: LinearCombination, tau, box_L: float | None = None):
    """Fraction of samples with L in (-box_L, box_L)^{2J} and log|F| > tau.

    ``tau`` may be an array; ``source`` is an EmpiricalDistribution, a
    ReferenceSample or a raw (n, 2J) array.
    """
    s = source.samples if hasattr(source, "samples") else np.asarray(source)
    J = s.shape[1] // 2
    if box_L is None:
        sigma = getattr(source, "sigma")
        box_L = default_box_L(float(np.max(comb.xi)), sigma)
    inbox = np.all(np.abs(s) < box_L, axis=1)
    F = np.sum(comb.weights * np.exp(s[:, :J] + 1j * s[:, J:]), axis=1)
    la = np.log(np.abs(F))
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    frac = np.array([np.count_nonzero(inbox & (la > t)) for t in tau_arr]) / s.shape[0]
    return float(frac[0]) if np.ndim(tau) == 0 else frac


# ----------------------------------------------------- Beurling-Selberg

def bs_K(z):
    """K(z) = (sin(pi z) / (pi z))^2."""
    return np.sinc(np.asarray(z, dtype=float)) ** 2


def bs_H(z):
    """Beurling's function H(z) = (sin pi z / pi)^2 (sum_n sgn(n)/(z-n)^2 + 2/z).

    Evaluated for z > 0 through the trigamma identity
    H(z) = 1 - 2 (sin pi z / pi)^2 psi'(1 + z) - K(z) + 2 z K(z), extended as
    an odd function (H(0) = 0). This has no removable singularities.
    """
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    s2 = (np.sin(np.pi * a) / np.pi) ** 2
    k = np.sinc(a) ** 2
    h = 1.0 - 2.0 * s2 * polygamma(1, 1.0 + a) - k + 2.0 * a * k
    out = np.sign(z) * h
    return float(out) if out.ndim == 0 else out


def bs_H_series(z, nmax: int = 10**4):
    """Direct truncated series for H with an integral tail correction (slow oracle)."""
    z = float(z)
    if z == 0.0:
        return 0.0
    m = int(np.rint(z))
    n = np.arange(-nmax, nmax + 1)
    n = n[(n != 0) & (n != m)]
    s2 = (np.sin(np.pi * z) / np.pi) ** 2
    total = s2 * np.sum(np.sign(n) / (z - n) ** 2)
    if m != 0:
        total += np.sign(m) * np.sinc(z - m) ** 2  # removable singularity at n = m
    # sum_{n > N} [1/(n - z)^2 - 1/(n + z)^2] by the midpoint integral
    N = nmax + 0.5
    total += s2 * (1.0 / (N - z) - 1.0 / (N + z))
    return float(total + s2 * 2.0 / z)


def bs_B(z, sign: int):
    """B+ (sign=+1) or B- (sign=-1) = H +- K."""
    return bs_H(z) + sign * bs_K(z)


@dataclass(frozen=True)
class BSWindow:
    a: float
    b: float
    delta: float

    def __post_init__(self):
        if not (self.b > self.a and self.delta > 0):
            raise ValueError("need b > a and delta > 0")


def bs_F(window: BSWindow, x):
    """F(x) = (B-(delta (x - a)) + B-(delta (b - x))) / 2, a smooth minorant of 1_[a,b]."""
    x = np.asarray(x, dtype=float)
    d = window.delta
    out = 0.5 * (bs_B(d * (x - window.a), -1) + bs_B(d * (window.b - x), -1))
    return float(out) if np.ndim(out) == 0 else out


def _osc_over_w2(omega: float, A: float, kind: str) -> float:
    """int_A^inf trig(omega w) / w^2 dw for trig = cos or sin."""
    if omega == 0.0:
        return 1.0 / A if kind == "cos" else 0.0
    sgn = 1.0 if (kind == "cos" or omega > 0) else -1.0
    val, err = quad(lambda w: 1.0 / w**2, A, np.inf, weight=kind, wvar=abs(omega), limlst=200)
    if not np.isfinite(val):
        raise QuadratureError("oscillatory tail integral failed")
    return sgn * val


def k_hat(xi: float) -> float:
    """Fourier transform of K at xi, computed numerically (expected max(0, 1 - |xi|))."""
    w = 2 * np.pi * abs(xi)
    A = 1.0
    head, _ = quad(lambda x: np.sinc(x) ** 2 * np.cos(w * x), 0.0, A, limit=200, epsabs=1e-13)
    # sinc^2(x) cos(w x) = [cos(w x) - cos((w+2pi)x)/2 - cos((w-2pi)x)/2] / (2 pi^2 x^2)
    tail = (_osc_over_w2(w, A, "cos") - 0.5 * _osc_over_w2(w + 2 * np.pi, A, "cos")
            - 0.5 * _osc_over_w2(w - 2 * np.pi, A, "cos")) / (2 * np.pi**2)
    return float(2 * (head + tail))


def _sinc2_tail_transform(c: float, delta: float, A: float, y: float, side: int) -> complex:
    """int over side*(x - c) > A of K(delta (x - c)) e^{-2 pi i x y} dx."""
    # x = c + side*w; K(delta w) = [1 - cos(2 pi delta w)] / (2 pi^2 delta^2 w^2)
    wy = 2 * np.pi * y * side
    out = 0j
    for coef, om in ((1.0, 0.0), (-0.5, 2 * np.pi * delta), (-0.5, -2 * np.pi * delta)):
        # cos(om w) e^{-i wy w} = [e^{i(om - wy) w} + e^{-i(om + wy) w}] / 2
        for f in (om - wy, -(om + wy)):
            out += coef * 0.5 * (_osc_over_w2(f, A, "cos") + 1j * _osc_over_w2(f, A, "sin"))
    return out * np.exp(-2j * np.pi * c * y) / (2 * np.pi**2 * delta**2)


def bs_F_hat(window: BSWindow, ys, span: float = 200.0, order: int = 16) -> np.ndarray:
    """Fourier transform of bs_F at frequencies ys (convention e^{-2 pi i x y}).

    Gauss-Legendre panels on [a - span/delta, b + span/delta]; beyond that F
    equals -(K(delta(x-a)) + K(delta(x-b)))/2 up to O((delta x)^-3) and the
    sinc^2 tails are integrated in closed oscillatory form.
    """
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    d = window.delta
    lo, hi = window.a - span / d, window.b + span / d
    width = 0.25 / max(d, float(np.max(np.abs(ys))), 1.0)
    n_pan = int(np.ceil((hi - lo) / width))
    x, w = gl_nodes(order)
    edges = np.linspace(lo, hi, n_pan + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    xs = (mid[:, None] + half[:, None] * x).ravel()
    ws = (half[:, None] * w).ravel()
    fx = bs_F(window, xs) * ws
    out = np.empty(ys.size, dtype=complex)
    for i, y in enumerate(ys):
        core = np.sum(fx * np.exp(-2j * np.pi * xs * y))
        tails = 0j
        for c in (window.a, window.b):
            tails += _sinc2_tail_transform(c, d, hi - c, y, +1)
            tails += _sinc2_tail_transform(c, d, c - lo, y, -1)
        out[i] = core - 0.5 * tails
    return out


def indicator_hat(a: float, b: float, ys) -> np.ndarray:
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    out = np.empty(ys.size, dtype=complex)
    nz = ys != 0
    y = ys[nz]
    out[nz] = (np.exp(-2j * np.pi * a * y) - np.exp(-2j * np.pi * b * y)) / (2j * np.pi * y)
    out[~nz] = b - a
    return out


@dataclass
class BSFourierReport:
    window: BSWindow
    k_hat_values: dict
    outside_max_modulus: float
    inside_fitted_C: float
    passed: bool


def bs_fourier_check(window: BSWindow, n_outside: int = 24, n_inside: int = 24) -> BSFourierReport:
    """Numerical checks of the band limitation of bs_F and of K-hat.

    Outside: |F-hat(y)| < 1e-4 for |y| in [delta (1 + 1e-3), 2 delta].
    Inside: C = max_{|y| < delta} delta |F-hat(y) - 1_I-hat(y)| is reported.
    """
    d = window.delta
    khat = {xi: k_hat(xi) for xi in (0.0, 0.5, 1.5)}
    yo = np.linspace(d * (1 + 1e-3), 2 * d, n_outside)
    out_mod = float(np.max(np.abs(bs_F_hat(window, np.concatenate([yo, -yo])))))
    yi = np.linspace(-d, d, n_inside + 2)[1:-1]
    C = float(np.max(np.abs(bs_F_hat(window, yi) - indicator_hat(window.a, window.b, yi))) * d)
    ok = (out_mod < 1e-4 and abs(khat[0.0] - 1) < 1e-8 and abs(khat[0.5] - 0.5) < 1e-8
          and abs(khat[1.5]) < 1e-8)
    return BSFourierReport(window, khat, out_mod, C, ok)
