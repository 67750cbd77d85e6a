"""Experiment configuration: YAML in, validated dataclasses out."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import yaml

from .errors import ConfigError
from .lfunc import LinearCombination, dirichlet_spec, zeta_spec

_F, _I, _B, _S, _LF, _LI = "float", "int", "bool", "str", "list[float]", "list[int]"

# parameter name -> (type, default); None as default means required
SCHEMA: dict[str, dict[str, tuple]] = {
    "count-zeros": {"sigma_lo": (_F, None), "sigma_hi": (_F, None), "t_lo": (_F, None),
                    "t_hi": (_F, None), "boundary_floor": (_F, 1e-8), "sigma0": (_F, 2.5),
                    "refine": (_B, False)},
    "k0": {"J": (_I, 2), "xi": (_LF, [1.0, 1.0]), "method": (_S, "quadrature"),
           "budget": (_I, 10**6)},
    "mc-expect": {"sigma": (_F, None), "n_samples": (_I, 10**5), "Y": (_F, 1e4),
                  "tail": (_S, "gaussian"), "antithetic": (_B, False)},
    "mc-increment": {"G": (_F, None), "n_samples": (_I, 10**5), "Y": (_F, 1e4),
                     "tail": (_S, "gaussian")},
    "mc-tail": {"sigma": (_F, None), "taus": (_LF, [1.0, 2.0, 3.0]), "n_samples": (_I, 10**5),
                "Y": (_F, 1e4), "tail": (_S, "gaussian")},
    "mc-concentration": {"sigma": (_F, None), "M": (_F, 8.0), "R": (_F, 1.0),
                         "eps_values": (_LF, [0.1, 0.05, 0.025]), "n_samples": (_I, 10**5),
                         "Y": (_F, 1e4), "tail": (_S, "gaussian")},
    "density": {"sigma": (_F, None), "half_width": (_F, 8.0), "n": (_I, 64),
                "prime_cutoff": (_F, 1e4), "tail": (_S, "none")},
    "charfn": {"sigma": (_F, None), "x_values": (_LF, [0.05, 0.1, 0.15, 0.2, 0.25, 0.3]),
               "prime_cutoff": (_F, 1e4), "tail": (_S, "none")},
    "discrepancy": {"sigma": (_F, 0.6), "T_values": (_LF, [500.0, 2000.0, 8000.0]),
                    "grid_step": (_F, 0.1), "mc_budget": (_I, 10**5), "n_seeds": (_I, 3)},
    "bs-check": {"a": (_F, 0.0), "b": (_F, 1.0), "deltas": (_LF, [1.0, 4.0, 16.0])},
    "tail-cdf": {"sigma": (_F, 0.6), "T": (_F, 1000.0), "grid_step": (_F, 0.1),
                 "taus": (_LF, [-2.0, -1.0, 0.0, 1.0, 2.0]), "box_L": (_F, 0.0),
                 "mc_budget": (_I, 10**5)},
    "selberg-check": {"x_values": (_LF, [1e3, 1e4, 1e5, 1e6, 1e7]), "max_modulus": (_I, 13)},
    "littlewood-check": {"sigma": (_F, 0.55), "T": (_F, 30.0), "sigma0": (_F, 2.5)},
    "nf-curve": {"G_values": (_LF, [4.0, 8.0, 16.0, 32.0]), "T": (_F, 100.0),
                 "sigma0": (_F, 2.5)},
}
NEEDS_COMBINATION = {"count-zeros", "mc-expect", "mc-increment", "mc-tail", "mc-concentration",
                     "density", "charfn", "discrepancy", "tail-cdf", "littlewood-check", "nf-curve"}
CHOICES = {"method": ("quadrature", "montecarlo"), "tail": ("none", "factors", "gaussian")}


@dataclass(frozen=True)
class MemberDescriptor:
    kind: str = "zeta"
    modulus: int = 1
    index: tuple = ()
    xi: float = 1.0

    def spec(self):
        if self.kind == "zeta":
            return zeta_spec()
        return dirichlet_spec(self.modulus, self.index, xi=self.xi)


@dataclass(frozen=True)
class CombinationDescriptor:
    members: tuple
    weights: tuple

    def build(self) -> LinearCombination:
        return LinearCombination([m.spec() for m in self.members], list(self.weights))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: dict = field(hash=False)
    combination: CombinationDescriptor | None = None
    seed: int = 0
    out_dir: str = "results"
    workers: int = 1

    def config_hash(self) -> str:
        d = to_dict(self)
        del d["out_dir"], d["workers"]  # neither changes the numbers
        blob = json.dumps(d, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def _coerce(name, typ, val):
    try:
        if typ == _F:
            if isinstance(val, bool):
                raise TypeError
            return float(val)
        if typ == _I:
            if isinstance(val, bool) or (isinstance(val, float) and not val.is_integer()):
                raise TypeError
            return int(val)
        if typ == _B:
            if not isinstance(val, bool):
                raise TypeError
            return val
        if typ == _S:
            if not isinstance(val, str):
                raise TypeError
            if name in CHOICES and val not in CHOICES[name]:
                raise ConfigError(f"{name} must be one of {CHOICES[name]}")
            return val
        if typ in (_LF, _LI):
            if isinstance(val, (str, bytes)) or not hasattr(val, "__iter__"):
                raise TypeError
            inner = _F if typ == _LF else _I
            return [_coerce(name, inner, v) for v in val]
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"parameter {name!r}: expected {typ}, got {val!r}") from None
    raise ConfigError(f"unknown type {typ}")


def _member_from(d) -> MemberDescriptor:
    if not isinstance(d, dict):
        raise ConfigError("member must be a mapping")
    extra = set(d) - {"kind", "modulus", "index", "xi"}
    if extra:
        raise ConfigError(f"unknown member keys {sorted(extra)}")
    kind = d.get("kind", "zeta")
    if kind not in ("zeta", "dirichlet"):
        raise ConfigError(f"member kind must be zeta or dirichlet, got {kind!r}")
    mod = _coerce("modulus", _I, d.get("modulus", 1))
    idx = tuple(_coerce("index", _LI, d.get("index", [])))
    xi = _coerce("xi", _F, d.get("xi", 1.0))
    if kind == "dirichlet" and mod < 1:
        raise ConfigError("modulus must be positive")
    if xi <= 0:
        raise ConfigError("xi must be positive")
    return MemberDescriptor(kind, mod if kind == "dirichlet" else 1, idx if kind == "dirichlet" else (), xi)


def _combination_from(d) -> CombinationDescriptor:
    if not isinstance(d, dict):
        raise ConfigError("combination must be a mapping")
    extra = set(d) - {"members", "weights"}
    if extra:
        raise ConfigError(f"unknown combination keys {sorted(extra)}")
    members = d.get("members")
    if not isinstance(members, list) or not members:
        raise ConfigError("combination needs a nonempty member list")
    mems = tuple(_member_from(m) for m in members)
    weights = tuple(_coerce("weights", _LF, d.get("weights", [1.0] * len(mems))))
    if len(weights) != len(mems) or any(w == 0 for w in weights):
        raise ConfigError("need one nonzero weight per member")
    desc = CombinationDescriptor(mems, weights)
    try:
        desc.build()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid combination: {exc}") from None
    return desc


def from_dict(d) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a mapping")
    extra = set(d) - {"kind", "params", "combination", "seed", "out_dir", "workers"}
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)}")
    kind = d.get("kind")
    if kind not in SCHEMA:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    raw = d.get("params") or {}
    if not isinstance(raw, dict):
        raise ConfigError("params must be a mapping")
    schema = SCHEMA[kind]
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
    params = {}
    for name, (typ, default) in schema.items():
        if name in raw and raw[name] is not None:
            params[name] = _coerce(name, typ, raw[name])
        elif default is None:
            raise ConfigError(f"missing required parameter {name!r} for {kind}")
        else:
            params[name] = _coerce(name, typ, default)
    comb = None
    if d.get("combination") is not None:
        comb = _combination_from(d["combination"])
    elif kind in NEEDS_COMBINATION:
        raise ConfigError(f"{kind} needs a combination")
    seed = _coerce("seed", _I, d.get("seed", 0))
    workers = _coerce("workers", _I, d.get("workers", 1))
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    out_dir = d.get("out_dir", "results")
    if not isinstance(out_dir, str):
        raise ConfigError("out_dir must be a string")
    return ExperimentConfig(kind, params, comb, seed, out_dir, workers)


def to_dict(cfg: ExperimentConfig) -> dict:
    out = {"kind": cfg.kind, "params": dict(cfg.params), "seed": cfg.seed,
           "out_dir": cfg.out_dir, "workers": cfg.workers}
    if cfg.combination is not None:
        out["combination"] = {
            "members": [{k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(m).items()}
                        for m in cfg.combination.members],
            "weights": list(cfg.combination.weights),
        }
    return out


def parse(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return from_dict(data)


def serialize(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=True)


def load(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None


def parse_combination(text: str, weights: str | None = None) -> CombinationDescriptor:
    """Compact form: 'zeta', 'dirichlet:5:1', members joined by '+'; exponents by '.'."""
    members = []
    for tok in text.split("+"):
        parts = tok.strip().split(":")
        if parts[0] == "zeta" and len(parts) == 1:
            members.append({"kind": "zeta"})
        elif parts[0] == "dirichlet" and len(parts) in (2, 3):
            try:
                idx = [int(e) for e in parts[2].split(".")] if len(parts) == 3 and parts[2] else []
                members.append({"kind": "dirichlet", "modulus": int(parts[1]), "index": idx})
            except ValueError:
                raise ConfigError(f"bad member {tok!r}") from None
        else:
            raise ConfigError(f"bad member {tok!r}")
    w = [1.0] * len(members)
    if weights:
        try:
            w = [float(v) for v in weights.split(",")]
        except ValueError:
            raise ConfigError(f"bad weights {weights!r}") from None
    return _combination_from({"members": members, "weights": w})
