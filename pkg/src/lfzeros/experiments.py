"""One runner per experiment kind.

A runner takes an ExperimentConfig and returns an Outcome: a JSON-ready
payload, optional CSV tables and the verdict of its self-check.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .characters import primitive_characters_mod
from .config import ExperimentConfig
from .density import GridSpec, char_fn, compute_K0, invert_density, k0_closed_form_J2
from .discrepancy import (BSWindow, bs_fourier_check, default_box_L, random_reference,
                          sample_L_vector, sup_box_discrepancy, tail_distribution_Psi)
from .lfunc import (LinearCombination, character_spec, eval_F_tgrid, selberg_sum, single,
                    zeta_spec)
from .random_model import (MCConfig, SampleStats, concentration_prob, coupled_increment,
                           mc_expect_logF, tail_prob_curve)
from .zeros import (Rectangle, ZeroCountConfig, breakpoint_sum, empirical_NF_curve,
                    littlewood_edge_terms, littlewood_lhs, littlewood_rhs, refine_zeros,
                    winding_count)


@dataclass
class Outcome:
    payload: dict
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    check_ok: bool = True
    check_msg: str = "no check defined"
    timings: dict = field(default_factory=dict)


class _Timer:
    def __init__(self, sink, name):
        self.sink, self.name = sink, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.sink[self.name] = self.sink.get(self.name, 0.0) + time.perf_counter() - self.t0


def _stats(s: SampleStats) -> dict:
    return {"mean": s.mean, "std_error": s.std_error, "n": s.n, "rejected": s.rejected}


def _mc(cfg: ExperimentConfig, **over) -> MCConfig:
    p = cfg.params
    kw = dict(n_samples=p["n_samples"], Y=p["Y"], seed=cfg.seed, tail=p["tail"])
    kw.update(over)
    return MCConfig(**kw)


def time_average_logF(comb: LinearCombination, sigma: float, t_lo: float, t_hi: float,
                      dt: float = 0.01, block: float = 20.0) -> SampleStats:
    """(1/(t_hi - t_lo)) int log|F(sigma + it)| dt by Simpson's rule.

    The error bar is the batch-means standard error over blocks of length
    ``block``, i.e. the fluctuation of the average viewed as an estimate of
    the long-run mean.
    """
    n = int(round((t_hi - t_lo) / dt))
    if n % 2:
        n += 1
    h = (t_hi - t_lo) / n
    vals = np.log(np.abs(eval_F_tgrid(comb, sigma, t_lo, h, n + 1)))
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    mean = float(h / 3 * np.sum(w * vals) / (t_hi - t_lo))
    per = max(2, int(round(block / h)))
    nb = n // per
    bm = vals[: nb * per].reshape(nb, per).mean(axis=1)
    se = float(np.std(bm, ddof=1) / np.sqrt(nb))
    return SampleStats(mean, se, n + 1, {}, meta={"sigma": sigma, "t_lo": t_lo, "t_hi": t_hi,
                                                   "dt": h, "block": block})


# ------------------------------------------------------------------ runners

def run_count_zeros(cfg: ExperimentConfig) -> Outcome:
    p, comb, tm = cfg.params, cfg.combination.build(), {}
    zc = ZeroCountConfig(boundary_floor=p["boundary_floor"], sigma0=max(p["sigma0"], 1.0 + 1e-9))
    if p["t_hi"] <= p["t_lo"] or p["sigma_hi"] <= p["sigma_lo"]:
        payload = {"count": 0, "flags": ["degenerate rectangle"], "rect": [p["sigma_lo"], p["sigma_hi"],
                   p["t_lo"], p["t_hi"]], "windings_per_edge": [], "zeros": []}
        return Outcome(payload, check_ok=True, check_msg="degenerate rectangle has no zeros")
    rect = Rectangle(p["sigma_lo"], p["sigma_hi"], p["t_lo"], p["t_hi"])
    with _Timer(tm, "winding_count"):
        rep = winding_count(comb, rect, zc)
    zeros = []
    if p["refine"] and rep.count:
        with _Timer(tm, "refine_zeros"):
            zeros = refine_zeros(comb, rect, rep, zc)
    payload = {"count": rep.count, "raw_winding": rep.raw_winding,
               "windings_per_edge": rep.windings_per_edge, "flags": list(rep.flags),
               "rect": [rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi],
               "n_evaluations": rep.n_evaluations,
               "zeros": [[z.real, z.imag] for z in zeros]}
    tables = {"zeros": (["re", "im"], [[z.real, z.imag] for z in zeros])} if zeros else {}
    ok = abs(rep.raw_winding - rep.count) < 1e-6 and (not p["refine"] or len(zeros) == rep.count)
    return Outcome(payload, tables, ok, "winding is an integer" if ok else "winding check failed", tm)


def run_k0(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    if len(p["xi"]) != p["J"]:
        from .errors import ConfigError
        raise ConfigError("xi needs J entries")
    with _Timer(tm, "compute_K0"):
        r = compute_K0(p["J"], p["xi"], p["method"], budget=p["budget"], seed=cfg.seed)
    payload = {"value": r.value, "abs_error_estimate": r.abs_error_estimate, "method": r.method,
               "J": r.J, "xi": list(r.xi), "n_samples": r.n_samples, "flags": list(r.flags)}
    if p["J"] == 2:
        exact = k0_closed_form_J2(*p["xi"])
        payload["closed_form"] = exact
        rel = abs(r.value - exact) / exact
        if r.method == "quadrature":
            ok = rel <= 1e-4
        else:
            ok = abs(r.value - exact) <= 3 * r.abs_error_estimate
        msg = f"relative error {rel:.2e} against closed form"
    else:
        ok = r.value > 0 or p["J"] == 1
        msg = "positive" if ok else "K0 not positive"
    return Outcome(payload, check_ok=ok, check_msg=msg, timings=tm)


def run_mc_expect(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    with _Timer(tm, "mc_expect_logF"):
        s = mc_expect_logF(cfg.combination.build(), p["sigma"], _mc(cfg, antithetic=p["antithetic"]))
    payload = {"sigma": p["sigma"], **_stats(s), "quantiles": {str(k): v for k, v in s.quantiles.items()}}
    return Outcome(payload, timings=tm)


def run_mc_increment(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    with _Timer(tm, "coupled_increment"):
        ci = coupled_increment(comb, p["G"], _mc(cfg))
    inc1, inc2 = ci.increments
    payload = {"G": p["G"], "sigmas": list(ci.sigmas), "i1": _stats(inc1), "i2": _stats(inc2)}
    ok = inc1.mean + 1.96 * inc1.std_error < 0 and inc2.mean - 1.96 * inc2.std_error > 0
    return Outcome(payload, check_ok=ok, check_msg="increment signs at 95%", timings=tm)


def run_mc_tail(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    spec = cfg.combination.build().members[0]
    with _Timer(tm, "tail_prob_curve"):
        est = tail_prob_curve(spec, p["sigma"], p["taus"], _mc(cfg))
    rows = [[tau, e.p, e.ci_lo, e.ci_hi, e.hits] for tau, e in zip(p["taus"], est)]
    payload = {"sigma": p["sigma"], "rows": rows, "n": est[0].n if est else 0}
    return Outcome(payload, {"tail": (["tau", "p", "ci_lo", "ci_hi", "hits"], rows)}, timings=tm)


def run_mc_concentration(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    rows = []
    with _Timer(tm, "concentration_prob"):
        for eps in p["eps_values"]:
            e = concentration_prob(comb, p["sigma"], p["M"], p["R"], eps, _mc(cfg))
            rows.append([eps, e.p, e.ci_lo, e.ci_hi, e.hits])
    payload = {"sigma": p["sigma"], "M": p["M"], "R": p["R"], "rows": rows}
    return Outcome(payload, {"concentration": (["eps", "p", "ci_lo", "ci_hi", "hits"], rows)},
                   timings=tm)


def run_density(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    with _Timer(tm, "invert_density"):
        g = invert_density(comb.members, p["sigma"], GridSpec(p["half_width"], p["n"]),
                           p["prime_cutoff"], p["tail"])
    J = comb.J
    mesh = np.meshgrid(*g.axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    header = [f"u{j + 1}" for j in range(J)] + [f"v{j + 1}" for j in range(J)] + ["H", "cell_mass"]
    if J == 1:
        header = ["u", "v", "H", "cell_mass"]
    rows = np.column_stack(cols + [g.values.ravel(), g.cell_mass.ravel()]).tolist()
    payload = {"sigma": g.sigma, "J": J, "n": int(g.values.shape[0]), "spacing": g.spacing,
               "half_width": p["half_width"], "mass": g.mass(), "boundary_modulus": g.boundary_modulus,
               "imag_residue": g.imag_residue, "prime_cutoff": g.prime_cutoff, "tail": p["tail"],
               "flags": list(g.flags), "columns": header}
    ok = abs(g.mass() - 1) <= 1e-2
    return Outcome(payload, {"grid": (header, rows)}, ok, f"mass {g.mass():.6f}", tm)


def run_charfn(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    J = comb.J
    xs = np.asarray(p["x_values"])
    X = np.zeros((xs.size, J))
    X[:, 0] = xs
    with _Timer(tm, "char_fn"):
        phi = np.asarray(char_fn(comb.members, p["sigma"], (X, np.zeros_like(X)),
                                 p["prime_cutoff"], p["tail"]))
    rows = [[float(x), float(v.real), float(v.imag), float(abs(v))] for x, v in zip(xs, phi)]
    payload = {"sigma": p["sigma"], "rows": rows}
    ok = bool(np.all(np.abs(phi) <= 1 + 1e-12))
    return Outcome(payload, {"charfn": (["x", "re", "im", "abs"], rows)}, ok, "|phi| <= 1", tm)


def run_discrepancy(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    refs = []
    with _Timer(tm, "random_reference"):
        for k in range(p["n_seeds"]):
            refs.append(random_reference(comb, p["sigma"], p["mc_budget"], seed=cfg.seed + k))
    rows = []
    for T in p["T_values"]:
        with _Timer(tm, "sample_L_vector"):
            emp = sample_L_vector(comb, p["sigma"], T, p["grid_step"])
        with _Timer(tm, "sup_box_discrepancy"):
            vals = [sup_box_discrepancy(emp, comb, reference=r).value for r in refs]
        rows.append([T, float(np.mean(vals)), float(np.std(vals)), emp.samples.shape[0], emp.skipped])
    payload = {"sigma": p["sigma"], "rows": rows}
    means = [r[1] for r in rows]
    ok = all(a > b for a, b in zip(means, means[1:]))
    return Outcome(payload, {"ladder": (["T", "sup_disc", "seed_sd", "n_points", "skipped"], rows)},
                   ok, "strictly decreasing" if ok else "not decreasing", tm)


def run_bs_check(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    rows, ok = [], True
    with _Timer(tm, "bs_fourier_check"):
        for d in p["deltas"]:
            r = bs_fourier_check(BSWindow(p["a"], p["b"], d))
            rows.append([d, r.outside_max_modulus, r.inside_fitted_C, bool(r.passed)])
            ok &= bool(r.passed)
    payload = {"a": p["a"], "b": p["b"], "rows": rows}
    return Outcome(payload, {"bs": (["delta", "outside_max", "fitted_C", "passed"], rows)}, ok,
                   "band limitation holds" if ok else "band limitation violated", tm)


def run_tail_cdf(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    L = p["box_L"] or default_box_L(float(np.max(comb.xi)), p["sigma"])
    with _Timer(tm, "sample_L_vector"):
        emp = sample_L_vector(comb, p["sigma"], p["T"], p["grid_step"])
    with _Timer(tm, "random_reference"):
        ref = random_reference(comb, p["sigma"], p["mc_budget"], seed=cfg.seed)
    taus = np.asarray(p["taus"])
    a = np.atleast_1d(tail_distribution_Psi(emp, comb, taus, L))
    b = np.atleast_1d(tail_distribution_Psi(ref, comb, taus, L))
    rows = [[float(t), float(x), float(y)] for t, x, y in zip(taus, a, b)]
    payload = {"sigma": p["sigma"], "T": p["T"], "box_L": L, "rows": rows,
               "sup_diff": float(np.max(np.abs(a - b)))}
    return Outcome(payload, {"psi": (["tau", "psi_T", "psi_rand"], rows)}, timings=tm)


def selberg_table(x_values, max_modulus: int):
    specs = [zeta_spec()] + [character_spec(c) for q in range(3, max_modulus + 1)
                             for c in primitive_characters_mod(q)]
    labels = ["zeta"] + [s.label for s in specs[1:]]
    diag = {lab: [selberg_sum(s, s, x).real - np.log(np.log(x)) for x in x_values]
            for lab, s in zip(labels, specs)}
    pairs = {}
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            if specs[i].primitive_key != specs[j].primitive_key:
                pairs[(labels[i], labels[j])] = [abs(selberg_sum(specs[i], specs[j], x))
                                                 for x in x_values]
    return diag, pairs


def run_selberg_check(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    with _Timer(tm, "selberg_sum"):
        diag, pairs = selberg_table(p["x_values"], p["max_modulus"])
    rows = [[lab, x, v] for lab, vals in diag.items() for x, v in zip(p["x_values"], vals)]
    width = max(max(v) - min(v) for v in diag.values())
    worst = max((max(v) for v in pairs.values()), default=0.0)
    payload = {"max_band_width": width, "max_pair_modulus": worst, "n_functions": len(diag),
               "n_pairs": len(pairs)}
    ok = width < 1.0 and worst < 3.0
    return Outcome(payload, {"diag": (["label", "x", "S_minus_loglog"], rows)}, ok,
                   f"band width {width:.3f}, worst pair {worst:.3f}", tm)


def run_littlewood_check(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    comb = cfg.combination.build()
    zc = ZeroCountConfig(sigma0=p["sigma0"])
    rect = Rectangle(p["sigma"], zc.sigma0, p["T"], 2 * p["T"])
    with _Timer(tm, "refine_zeros"):
        zs = refine_zeros(comb, rect, winding_count(comb, rect, zc), zc)
    with _Timer(tm, "littlewood_lhs"):
        lhs = littlewood_lhs(comb, p["sigma"], zc, p["T"], zeros=zs)
    with _Timer(tm, "littlewood_rhs"):
        rhs = littlewood_rhs(comb, p["sigma"], zc, p["T"])
    with _Timer(tm, "littlewood_edge_terms"):
        edge = littlewood_edge_terms(comb, p["sigma"], zc, p["T"])
    bsum = breakpoint_sum(zs, p["sigma"])
    payload = {"lhs": lhs, "rhs": rhs, "edge_terms": edge, "breakpoint_sum": bsum,
               "closure": lhs - rhs - edge, "zeros": [[z.real, z.imag] for z in zs]}
    ok = abs(lhs - rhs) <= 0.5 and abs(lhs - bsum) <= 1e-6
    return Outcome(payload, check_ok=ok, check_msg=f"|lhs - rhs| = {abs(lhs - rhs):.4f}", timings=tm)


def run_nf_curve(cfg: ExperimentConfig) -> Outcome:
    p, tm = cfg.params, {}
    with _Timer(tm, "empirical_NF_curve"):
        c = empirical_NF_curve(cfg.combination.build(), p["G_values"], p["T"],
                               ZeroCountConfig(sigma0=p["sigma0"]))
    rows = [[G, s, n] for G, s, n in c.rows]
    counts = [r[2] for r in rows]
    ok = all(a <= b for a, b in zip(counts, counts[1:]))
    return Outcome({"T": c.T, "sigma0": c.sigma0, "rows": rows},
                   {"nf": (["G", "sigma", "count"], rows)}, ok, "count monotone in G", tm)


RUNNERS = {
    "count-zeros": run_count_zeros, "k0": run_k0, "mc-expect": run_mc_expect,
    "mc-increment": run_mc_increment, "mc-tail": run_mc_tail,
    "mc-concentration": run_mc_concentration, "density": run_density, "charfn": run_charfn,
    "discrepancy": run_discrepancy, "bs-check": run_bs_check, "tail-cdf": run_tail_cdf,
    "selberg-check": run_selberg_check, "littlewood-check": run_littlewood_check,
    "nf-curve": run_nf_curve,
}
