"""Argument-principle zero counting, zero refinement and the Littlewood identity."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MaxDepthError, QuadratureError, ZeroNearBoundaryError
from .lfunc import LinearCombination, eval_F, eval_F_tgrid
from .quadrature import tanh_sinh

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Rectangle:
    sigma_lo: float
    sigma_hi: float
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not (self.sigma_lo < self.sigma_hi and self.t_lo < self.t_hi):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.sigma_hi - self.sigma_lo, self.t_hi - self.t_lo))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.sigma_lo + self.sigma_hi), 0.5 * (self.t_lo + self.t_hi))

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.sigma_lo - pad <= z.real <= self.sigma_hi + pad
                and self.t_lo - pad <= z.imag <= self.t_hi + pad)

    def edges(self):
        a = complex(self.sigma_lo, self.t_lo)
        b = complex(self.sigma_hi, self.t_lo)
        c = complex(self.sigma_hi, self.t_hi)
        d = complex(self.sigma_lo, self.t_hi)
        return [("bottom", a, b), ("right", b, c), ("top", c, d), ("left", d, a)]

    def split(self, fs: float = 0.5, ft: float = 0.5):
        sm = self.sigma_lo + fs * (self.sigma_hi - self.sigma_lo)
        tm = self.t_lo + ft * (self.t_hi - self.t_lo)
        return [
            Rectangle(self.sigma_lo, sm, self.t_lo, tm),
            Rectangle(sm, self.sigma_hi, self.t_lo, tm),
            Rectangle(self.sigma_lo, sm, tm, self.t_hi),
            Rectangle(sm, self.sigma_hi, tm, self.t_hi),
        ]


@dataclass(frozen=True)
class ZeroCountConfig:
    boundary_floor: float = 1e-8
    max_subdivision_depth: int = 40
    sigma0: float = 2.5
    precision: float = 1e-12
    initial_step: float = 0.05
    min_sigma: float = 0.5 + 1e-3
    max_nudges: int = 3

    def __post_init__(self):
        if not self.boundary_floor > 0:
            raise ValueError("boundary_floor must be positive")
        if not self.sigma0 > 1:
            raise ValueError("sigma0 must exceed 1")


@dataclass
class ZeroCountReport:
    count: int
    windings_per_edge: list
    rect: Rectangle
    raw_winding: float = 0.0
    refined_zeros: list | None = None
    flags: list = field(default_factory=list)
    n_evaluations: int = 0


def _has_arithmetic_members(comb: LinearCombination) -> bool:
    return any(m.kind != "synthetic" for m in comb.members)


def _edge_increment(comb, z0, z1, cfg):
    """Argument increment of F along the segment z0 -> z1 (adaptive)."""
    n0 = max(8, int(np.ceil(abs(z1 - z0) / cfg.initial_step)))
    u = np.linspace(0.0, 1.0, n0 + 1)
    vals = eval_F(comb, z0 + (z1 - z0) * u, cfg.precision)
    n_eval = vals.size
    for depth in range(cfg.max_subdivision_depth + 1):
        absv = np.abs(vals)
        low = np.nonzero(absv < cfg.boundary_floor)[0]
        if low.size:
            z = z0 + (z1 - z0) * u[low[0]]
            raise ZeroNearBoundaryError(f"|F| < {cfg.boundary_floor} at {z}", point=z)
        steps = np.angle(vals[1:] / vals[:-1])
        rel = np.abs(np.diff(vals)) / np.minimum(absv[1:], absv[:-1])
        bad = (np.abs(steps) >= np.pi / 4) | (rel >= 0.5)
        if not bad.any():
            return float(steps.sum()), n_eval
        if depth == cfg.max_subdivision_depth:
            break
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (u[idx] + u[idx + 1])
        mvals = eval_F(comb, z0 + (z1 - z0) * mids, cfg.precision)
        n_eval += mids.size
        u = np.insert(u, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals)
    raise MaxDepthError(f"edge {z0}->{z1} not resolved at depth {cfg.max_subdivision_depth}")


def _winding_once(comb, rect, cfg):
    incs, n_eval = [], 0
    for _, z0, z1 in rect.edges():
        d, n = _edge_increment(comb, z0, z1, cfg)
        incs.append(d / TWO_PI)
        n_eval += n
    raw = float(sum(incs))
    count = int(round(raw))
    if abs(raw - count) > 1e-6:
        raise MaxDepthError(f"non-integer winding {raw}")
    return ZeroCountReport(count, incs, rect, raw, n_evaluations=n_eval)


def winding_count(comb: LinearCombination, rect: Rectangle,
                  cfg: ZeroCountConfig | None = None) -> ZeroCountReport:
    """Number of zeros of F inside ``rect`` (with multiplicity).

    When |F| drops below the boundary floor on an edge, the offending edge is
    shifted by 1e-6 (t for horizontal edges, sigma for vertical ones) and the
    count repeated; each shift is recorded in ``flags``.
    """
    cfg = cfg or ZeroCountConfig()
    if _has_arithmetic_members(comb) and rect.sigma_lo < cfg.min_sigma:
        raise ValueError(f"rectangle reaches left of sigma = {cfg.min_sigma}")
    flags = []
    cur = rect
    for attempt in range(cfg.max_nudges + 1):
        try:
            rep = _winding_once(comb, cur, cfg)
            rep.flags = flags
            return rep
        except ZeroNearBoundaryError as exc:
            if attempt == cfg.max_nudges:
                raise
            z = exc.point
            if abs(z.imag - cur.t_lo) < 1e-12 and abs(z.imag - cur.t_lo) <= abs(z.imag - cur.t_hi):
                cur = replace(cur, t_lo=cur.t_lo + 1e-6)
            elif abs(z.imag - cur.t_hi) < 1e-12:
                cur = replace(cur, t_hi=cur.t_hi + 1e-6)
            elif abs(z.real - cur.sigma_lo) <= abs(z.real - cur.sigma_hi):
                cur = replace(cur, sigma_lo=cur.sigma_lo + 1e-6)
            else:
                cur = replace(cur, sigma_hi=cur.sigma_hi + 1e-6)
            flags.append(f"nudged to {cur} (|F| small near {z})")
    raise AssertionError("unreachable")


# --------------------------------------------------------------- refinement

_SPLITS = [(0.5, 0.5), (0.4711, 0.5289), (0.5377, 0.4623), (0.4459, 0.4457)]


def _newton(comb, z, cell, prec, maxit=60):
    for _ in range(maxit):
        f = eval_F(comb, z, prec)
        h = 1e-6
        df = (eval_F(comb, z + h, prec) - eval_F(comb, z - h, prec)) / (2 * h)
        if df == 0:
            return None
        step = f / df
        z = z - step
        if not cell.contains(z, pad=0.25 * cell.diameter):
            return None
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    return z


def _local_winding(comb, z, half, cfg):
    box = Rectangle(z.real - half, z.real + half, z.imag - half, z.imag + half)
    local = replace(cfg, boundary_floor=1e-300, initial_step=half, min_sigma=-np.inf, max_nudges=0)
    return _winding_once(comb, box, local).count


def refine_zeros(comb: LinearCombination, rect: Rectangle, report: ZeroCountReport | None = None,
                 cfg: ZeroCountConfig | None = None, isolate_size: float = 0.05,
                 min_size: float = 1e-8) -> list:
    """One approximation per zero inside ``rect`` (repeated by multiplicity).

    Cells are quadrisected until each holds a single zero and is smaller than
    ``isolate_size``; Newton's method then polishes the zero, which is
    accepted once a box of diameter below ``min_size`` around it has winding
    one. A cell below ``min_size`` with winding >= 2 triggers a warning and
    the flag ``multiplicity-suspected``.
    """
    cfg = cfg or ZeroCountConfig()
    cfg = replace(cfg, min_sigma=-np.inf)
    report = report or winding_count(comb, rect, cfg)
    zeros: list = []
    stack = [(report.rect, report.count)]
    while stack:
        cell, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1 and cell.diameter < isolate_size:
            z = _newton(comb, cell.center, cell, cfg.precision)
            if z is not None and cell.contains(z) and _local_winding(comb, z, 0.3 * min_size, cfg) == 1:
                zeros.append(complex(z))
                continue
        if cell.diameter < min_size:
            msg = f"multiplicity-suspected: winding {cnt} in cell of diameter {cell.diameter:.2e}"
            warnings.warn(msg)
            report.flags.append(msg)
            zeros.extend([cell.center] * cnt)
            continue
        near = 0
        for fs, ft in _SPLITS:
            try:
                kids = cell.split(fs, ft)
                # split lines only need |F| above evaluation noise, not the user's floor
                sub = replace(cfg, initial_step=min(cfg.initial_step, 0.1 * cell.diameter), max_nudges=0,
                              boundary_floor=min(cfg.boundary_floor, 1e-10))
                counts = [_winding_once(comb, k, sub).count for k in kids]
            except ZeroNearBoundaryError:
                near += 1
                continue
            if sum(counts) == cnt:
                stack.extend((k, c) for k, c in zip(kids, counts) if c)
                break
            report.flags.append(f"split of {cell} gave {sum(counts)} != {cnt}; retrying")
        else:
            if cnt >= 2 and near == len(_SPLITS):
                # every split line runs through the cluster: not separable at this resolution
                msg = f"multiplicity-suspected: winding {cnt} unsplittable in cell of diameter {cell.diameter:.2e}"
                warnings.warn(msg)
                report.flags.append(msg)
                zeros.extend([cell.center] * cnt)
                continue
            raise MaxDepthError(f"could not split {cell}")
    zeros.sort(key=lambda z: (z.imag, z.real))
    report.refined_zeros = zeros
    return zeros


# -------------------------------------------------------------- Littlewood

def breakpoint_sum(zeros, sigma: float) -> float:
    """sum over zeros of (Re rho - sigma)^+."""
    return float(sum(max(z.real - sigma, 0.0) for z in zeros))


def littlewood_lhs(comb: LinearCombination, sigma: float, cfg: ZeroCountConfig | None, T: float,
                   quad_tol: float = 1e-10, zeros: list | None = None) -> float:
    """Integral over u in [sigma, sigma0] of N_F(u, T), zeros counted in [u, sigma0] x [T, 2T].

    The integrand is piecewise constant with jumps at the real parts of the
    refined zeros; on each piece the count is taken from an independent
    winding number at the piece midpoint.
    """
    cfg = cfg or ZeroCountConfig()
    if sigma >= cfg.sigma0:
        return 0.0
    rect = Rectangle(sigma, cfg.sigma0, T, 2 * T)
    if zeros is None:
        zeros = refine_zeros(comb, rect, winding_count(comb, rect, cfg), cfg)
    cuts = sorted({sigma, cfg.sigma0, *[z.real for z in zeros if sigma < z.real < cfg.sigma0]})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= quad_tol:
            continue
        mid = 0.5 * (a + b)
        n = winding_count(comb, Rectangle(mid, cfg.sigma0, T, 2 * T), cfg).count
        total += n * (b - a)
    return total


def _near_zero_points(comb, sigma, a, b, cfg, step=0.01, thresh=1e-3):
    n = int(np.ceil((b - a) / step))
    ts = a + (b - a) * np.arange(n + 1) / n
    vals = np.abs(eval_F_tgrid(comb, sigma, a, (b - a) / n, n + 1, cfg.precision))
    pts = []
    for i in np.nonzero(vals < 10 * thresh)[0]:
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n)]
        # golden-section search for the local minimum of |F| on the line
        g = 0.5 * (np.sqrt(5) - 1)
        for _ in range(60):
            x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
            if abs(eval_F(comb, sigma + 1j * x1)) < abs(eval_F(comb, sigma + 1j * x2)):
                hi = x2
            else:
                lo = x1
        t = 0.5 * (lo + hi)
        if abs(eval_F(comb, sigma + 1j * t)) < thresh and a < t < b:
            pts.append(t)
    pts = sorted(set(np.round(pts, 12)))
    return pts


def integrate_log_abs_F(comb: LinearCombination, sigma: float, a: float, b: float,
                        cfg: ZeroCountConfig | None = None, tol: float = 1e-9,
                        panel: float = 1.0) -> float:
    """Integral of log|F(sigma + i t)| over t in [a, b].

    The interval is split at near-zeros of F on the line (|F| < 1e-3) and
    into panels of width <= ``panel``; each piece uses tanh-sinh, which
    absorbs the integrable logarithmic endpoint singularities.
    """
    cfg = cfg or ZeroCountConfig()
    cuts = {a, b, *_near_zero_points(comb, sigma, a, b, cfg)}
    npan = int(np.ceil((b - a) / panel))
    cuts.update(a + (b - a) * np.arange(1, npan) / npan)
    cuts = sorted(cuts)
    f = lambda t: np.log(np.abs(eval_F(comb, sigma + 1j * t, cfg.precision)))
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-14:
            continue
        val, _ = tanh_sinh(f, lo, hi, tol=tol / len(cuts))
        total += val
    return total


def littlewood_rhs(comb: LinearCombination, sigma: float, cfg: ZeroCountConfig | None, T: float,
                   quad_tol: float = 1e-9) -> float:
    """(1/2pi) [int log|F(sigma+it)| - int log|F(sigma0+it)|] over [T, 2T] + (T/2pi)(sigma-sigma0) log n0."""
    cfg = cfg or ZeroCountConfig()
    if sigma == cfg.sigma0:
        return 0.0
    i1 = integrate_log_abs_F(comb, sigma, T, 2 * T, cfg, quad_tol)
    i0 = integrate_log_abs_F(comb, cfg.sigma0, T, 2 * T, cfg, quad_tol)
    return (i1 - i0) / TWO_PI + T / TWO_PI * (sigma - cfg.sigma0) * np.log(comb.n0)


def _normalised_arg_line(comb, t, u, cfg, sigma_far=None):
    """arg of f = F n0^s / alpha(n0) along the horizontal line at height t, for abscissas u.

    Continued from the right, where |f - 1| < 1/2 so the principal value is
    the continuous one.
    """
    n0, a0 = comb.n0, comb.leading_coeff
    f = lambda s: eval_F(comb, s, cfg.precision) * np.exp(s * np.log(n0)) / a0
    far = sigma_far or max(cfg.sigma0 + 1, 4.0)
    while abs(f(far + 1j * t) - 1) >= 0.5:
        far += 1.0
    grid = np.unique(np.concatenate([u, np.linspace(u.max(), far, 400)]))
    for _ in range(20):
        v = f(grid + 1j * t)
        d = np.angle(v[:-1] / v[1:])
        bad = np.abs(d) > np.pi / 8
        if not bad.any():
            break
        grid = np.unique(np.concatenate([grid, 0.5 * (grid[:-1] + grid[1:])[bad]]))
    else:
        raise QuadratureError("argument along horizontal edge not resolved")
    arg = np.angle(v[-1]) + np.concatenate([np.cumsum(d[::-1])[::-1], [0.0]])
    return np.interp(u, grid, arg)


def littlewood_edge_terms(comb: LinearCombination, sigma: float, cfg: ZeroCountConfig | None,
                          T: float, n_nodes: int = 4000) -> float:
    """(1/2pi)[int arg f(u + 2iT) du - int arg f(u + iT) du], u in [sigma, sigma0].

    These horizontal-edge terms close the Littlewood identity exactly:
    lhs = rhs + edge terms. f is F normalised by its leading Dirichlet term.
    """
    cfg = cfg or ZeroCountConfig()
    u = np.linspace(sigma, cfg.sigma0, n_nodes + 1)
    w = np.full(u.size, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    h = (cfg.sigma0 - sigma) / n_nodes
    top = _normalised_arg_line(comb, 2 * T, u, cfg)
    bot = _normalised_arg_line(comb, T, u, cfg)
    return float(h / 3 * np.sum(w * (top - bot))) / TWO_PI


# ---------------------------------------------------------------- N_F curve

@dataclass
class NFCurve:
    T: float
    sigma0: float
    rows: list  # (G, sigma, count)


def empirical_NF_curve(comb: LinearCombination, G_values, T: float,
                       cfg: ZeroCountConfig | None = None) -> NFCurve:
    """N_F(1/2 + 1/G, T) for each G: zeros in [1/2 + 1/G, sigma0] x [T, 2T]."""
    cfg = cfg or ZeroCountConfig()
    rows = []
    for G in sorted(G_values):
        sig = 0.5 + 1.0 / G
        if not sig > 0.5 + 1e-3:
            raise ValueError(f"G = {G} puts sigma too close to 1/2")
        rep = winding_count(comb, Rectangle(sig, cfg.sigma0, T, 2 * T), cfg)
        rows.append((float(G), sig, rep.count))
    return NFCurve(T, cfg.sigma0, rows)


def empirical_sigma_bound(comb: LinearCombination, t_lo: float, t_hi: float,
                          cfg: ZeroCountConfig | None = None) -> float:
    """Largest zero real part found in [0.501, sigma0] x [t_lo, t_hi] (heuristic bound)."""
    cfg = cfg or ZeroCountConfig()
    rect = Rectangle(cfg.min_sigma, cfg.sigma0, t_lo, t_hi)
    zs = refine_zeros(comb, rect, winding_count(comb, rect, cfg), cfg)
    return max((z.real for z in zs), default=float("nan"))
