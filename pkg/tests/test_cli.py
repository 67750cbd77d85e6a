import csv
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfzeros.cli import emit_plotdata, main
from lfzeros.config import SCHEMA, from_dict, parse, parse_combination, serialize
from lfzeros.density import k0_closed_form_J2
from lfzeros.errors import ConfigError

COMBO = {"members": [{"kind": "zeta"}, {"kind": "dirichlet", "modulus": 4, "index": [1]}],
         "weights": [1.0, 2.0]}


# ------------------------------------------------------------------ config

def _value(typ):
    return {"float": st.floats(0.51, 1e4, allow_nan=False),
            "int": st.integers(1, 10**6),
            "bool": st.booleans(),
            "list[float]": st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=4),
            "list[int]": st.lists(st.integers(0, 9), max_size=3)}[typ]


@st.composite
def configs(draw):
    kind = draw(st.sampled_from(sorted(SCHEMA)))
    params = {}
    for name, (typ, _d) in SCHEMA[kind].items():
        if typ == "str":
            params[name] = draw(st.sampled_from({"method": ["quadrature", "montecarlo"],
                                                 "tail": ["none", "factors", "gaussian"]}[name]))
        elif draw(st.booleans()) or _d is None:
            params[name] = draw(_value(typ))
    d = {"kind": kind, "params": params, "seed": draw(st.integers(0, 2**40)),
         "out_dir": draw(st.sampled_from(["results", "out/x"]))}
    if draw(st.booleans()) or kind not in ("k0", "bs-check", "selberg-check"):
        d["combination"] = COMBO
    return from_dict(d)


@given(configs())
@settings(max_examples=60, deadline=None)
def test_roundtrip(cfg):
    again = parse(serialize(cfg))
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


@pytest.mark.parametrize("bad", [
    {"kind": "k0", "params": {"J": 2}, "colour": "red"},
    {"kind": "k0", "params": {"J": 2, "typo": 1}},
    {"kind": "nope"},
    {"kind": "k0", "params": {"J": "two"}},
    {"kind": "k0", "params": {"method": "guess"}},
    {"kind": "mc-expect", "params": {"sigma": 0.6}},  # needs a combination
    {"kind": "mc-expect", "params": {}, "combination": COMBO},  # sigma missing
    {"kind": "mc-expect", "params": {"sigma": 0.6},
     "combination": {"members": [{"kind": "zeta", "colour": 1}], "weights": [1]}},
    {"kind": "mc-expect", "params": {"sigma": 0.6},
     "combination": {"members": [{"kind": "zeta"}], "weights": [0.0]}},
    {"kind": "k0", "workers": 0},
])
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        from_dict(bad)


def test_malformed_yaml():
    with pytest.raises(ConfigError):
        parse("kind: [unclosed")


def test_compact_combination():
    c = parse_combination("zeta+dirichlet:5:1", "1,1")
    F = c.build()
    assert F.J == 2 and F.members[1].modulus == 5
    with pytest.raises(ConfigError):
        parse_combination("zeta+bogus:3")


def test_hash_ignores_out_dir():
    a = from_dict({"kind": "k0", "out_dir": "a"})
    b = from_dict({"kind": "k0", "out_dir": "b", "workers": 4})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != from_dict({"kind": "k0", "seed": 1}).config_hash()


# --------------------------------------------------------------------- cli

def _artifact(out_dir, kind):
    (path,) = [p for p in out_dir.iterdir() if p.name.startswith(kind + "-") and p.suffix == ".json"]
    return path, json.loads(path.read_text())


def test_k0_check(tmp_path, capsys):
    assert main(["k0", "--J", "2", "--xi", "1,1", "--check", "--out-dir", str(tmp_path)]) == 0
    path, art = _artifact(tmp_path, "k0")
    assert abs(art["result"]["value"] - k0_closed_form_J2(1, 1)) < 1e-4
    assert art["check"]["passed"]
    man = json.loads((tmp_path / art["manifest"]).read_text())
    assert path.name in man["artifacts"] and man["config_hash"] == art["config_hash"]


def test_global_flags_before_subcommand(tmp_path):
    assert main(["--out-dir", str(tmp_path), "--seed", "3", "k0"]) == 0
    _, art = _artifact(tmp_path, "k0")
    assert art["config"]["seed"] == 3


def test_malformed_config_exit2_no_artifacts(tmp_path):
    cfgf = tmp_path / "bad.yaml"
    cfgf.write_text("kind: k0\nparams: {J: 2, bogus: 1}\n")
    out = tmp_path / "out"
    assert main(["run", str(cfgf), "--out-dir", str(out)]) == 2
    assert not out.exists()
    assert main(["k0", "--J", "x", "--out-dir", str(out)]) == 2
    assert main(["no-such-command"]) == 2
    assert not out.exists()


def test_degenerate_count(tmp_path):
    rc = main(["count-zeros", "--combo", "zeta", "--sigma-lo", "0.6", "--sigma-hi", "0.9",
               "--t-lo", "10", "--t-hi", "10", "--out-dir", str(tmp_path)])
    assert rc == 0
    _, art = _artifact(tmp_path, "count-zeros")
    assert art["result"]["count"] == 0


def test_count_zeros_cli(tmp_path):
    rc = main(["count-zeros", "--combo", "dirichlet:5:1+dirichlet:5:3", "--sigma-lo", "0.55",
               "--sigma-hi", "2.5", "--t-lo", "30", "--t-hi", "60", "--refine", "--check",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    _, art = _artifact(tmp_path, "count-zeros")
    assert art["result"]["count"] == 3 and len(art["result"]["zeros"]) == 3


def test_computation_failure_exit3(tmp_path):
    rc = main(["count-zeros", "--combo", "zeta", "--sigma-lo", "0.3", "--sigma-hi", "0.9",
               "--t-lo", "10", "--t-hi", "20", "--out-dir", str(tmp_path)])
    assert rc == 3


def test_check_failure_exit4(tmp_path):
    # a ladder given in decreasing T order cannot decrease strictly
    rc = main(["discrepancy", "--combo", "zeta", "--T-values", "400,50", "--mc-budget", "2000",
               "--n-seeds", "1", "--check", "--out-dir", str(tmp_path)])
    assert rc == 4
    _, art = _artifact(tmp_path, "discrepancy")
    assert art["check"]["passed"] is False


def test_byte_identical_artifacts(tmp_path):
    args = ["mc-expect", "--combo", "zeta+dirichlet:4:1", "--sigma", "0.7", "--n-samples", "3000",
            "--Y", "1000", "--seed", "5"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files_a:
        if not name.startswith("manifest-"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_run_from_yaml(tmp_path):
    cfg = from_dict({"kind": "bs-check", "params": {"deltas": [2.0]}, "out_dir": str(tmp_path)})
    f = tmp_path / "c.yaml"
    f.write_text(serialize(cfg))
    assert main(["run", str(f), "--check"]) == 0
    _, art = _artifact(tmp_path, "bs-check")
    assert art["result"]["rows"][0][3] is True


def test_plotdata_density(tmp_path):
    assert main(["density", "--combo", "zeta", "--sigma", "0.9", "--n", "32",
                 "--prime-cutoff", "100", "--out-dir", str(tmp_path)]) == 0
    path, art = _artifact(tmp_path, "density")
    out = emit_plotdata(path)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["series", "u", "v", "H"]
    assert len(rows) == 1 + art["result"]["n"] ** 2


def test_plotdata_nf_and_ladder(tmp_path):
    assert main(["nf-curve", "--combo", "dirichlet:5:1+dirichlet:5:3", "--G-values", "4,8",
                 "--T", "40", "--out-dir", str(tmp_path)]) == 0
    path, _ = _artifact(tmp_path, "nf-curve")
    rows = list(csv.reader(emit_plotdata(path).open()))
    assert rows[0] == ["series", "G", "count"] and len(rows) == 3
    assert main(["discrepancy", "--combo", "zeta", "--T-values", "50,100", "--mc-budget", "2000",
                 "--n-seeds", "1", "--out-dir", str(tmp_path)]) == 0
    path, _ = _artifact(tmp_path, "discrepancy")
    rows = list(csv.reader(emit_plotdata(path).open()))
    assert rows[0] == ["series", "T", "sup_disc"] and len(rows) == 3


def test_plotdata_unknown_kind(tmp_path):
    f = tmp_path / "x.json"
    f.write_text(json.dumps({"kind": "mystery", "result": {}}))
    with pytest.raises(ConfigError):
        emit_plotdata(f)
    assert main(["plotdata", str(f)]) == 2


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "lfzeros.cli", "bs-check", "--deltas", "1",
                        "--check", "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip().endswith(".json")
