import json
import math
import subprocess
import sys

import numpy as np
import pytest

from plurigreen import cli
from plurigreen.intervals import InfeasibleError, SoundnessError
from plurigreen.io import InputError, domain_from_dict, load_domain, parse_complex, parse_point


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text,val",
    [("0.5+0.1i", 0.5 + 0.1j), ("-0.2i", -0.2j), ("1e-3", 0.001), ("0.3-0.4j", 0.3 - 0.4j), (" 2 ", 2)],
)
def test_parse_complex(text, val):
    assert parse_complex(text) == val


@pytest.mark.parametrize("text", ["", "abc", "1+2k", "nan", "inf", "1++2i"])
def test_parse_complex_rejects(text):
    with pytest.raises(InputError):
        parse_complex(text)


def test_parse_point():
    assert np.array_equal(parse_point("0.5+0.1i,0"), np.array([0.5 + 0.1j, 0]))
    with pytest.raises(InputError):
        parse_point("1,2,3")


def test_domain_files(tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"type": "polydisk", "center": [[0, 0], [0, 0]], "radii": [1, 2]}))
    D = load_domain(str(f))
    assert D.dim == 2 and D.margin(np.array([0.9, 1.9])) > 0
    push = domain_from_dict({"type": "pushforward", "source": "bidisk", "map": {"type": "mobius", "index": 0, "a": [0.3, 0]}})
    assert push.dim == 2
    with pytest.raises(InputError):
        domain_from_dict({"type": "torus"})
    with pytest.raises(InputError):
        load_domain(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InputError):
        load_domain(str(bad))


def test_green_ball(capsys):
    code, out, _ = run(capsys, "green", "--domain", "ball2", "--z", "0.5,0", "--w", "0,0")
    rec = json.loads(out)
    assert code == 0
    assert rec["lo"] <= math.log(0.5) + 1e-12 <= rec["hi"] + 2e-12
    assert rec["quantity"] == "green" and rec["lo_provenance"]


def test_green_pole_encodes_minus_infinity(capsys):
    code, out, _ = run(capsys, "green", "--z", "0.1,0", "--w", "0.1,0")
    assert code == 0 and json.loads(out)["hi"] == "-inf"


@pytest.mark.parametrize(
    "argv",
    [
        ["green", "--z", "zz", "--w", "0,0"],
        ["green", "--z", "2,0", "--w", "0,0"],
        ["green", "--z", "0.1", "--w", "0,0"],
        ["green", "--domain", "nowhere", "--z", "0,0", "--w", "0,0"],
        ["exhaustion", "--w", "0,0", "--levels", "0.5"],
        ["verify", "nosuch"],
        ["scan", "--w", "0,0", "--coord", "3"],
        ["frobnicate"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_soundness_and_infeasible_exit_codes(capsys, monkeypatch):
    def boom(exc):
        def f(*a, **k):
            raise exc("x")

        return f

    monkeypatch.setattr(cli, "green_interval", boom(SoundnessError))
    assert run(capsys, "green", "--z", "0.1,0", "--w", "0,0")[0] == 3
    monkeypatch.setattr(cli, "green_interval", boom(InfeasibleError))
    assert run(capsys, "green", "--z", "0.1,0", "--w", "0,0")[0] == 4


def test_scan_csv(capsys):
    code, out, _ = run(capsys, "scan", "--w", "0,0", "--nx", "5", "--ny", "5")
    lines = out.strip().split("\n")
    assert code == 0 and len(lines) == 26
    assert lines[0] == "x,y,status,lo,hi,lo_provenance,hi_provenance"
    status = [l.split(",")[2] for l in lines[1:]]
    assert status.count("pole") == 1 and "outside" in status


def test_scan_empty_grid(capsys):
    code, out, _ = run(capsys, "scan", "--w", "0,0", "--nx", "0")
    assert code == 0 and out.strip().count("\n") == 0


def test_output_file(capsys, tmp_path):
    f = tmp_path / "o.json"
    code, out, _ = run(capsys, "caratheodory", "--z", "0.3,0", "--w", "0,0", "-o", str(f))
    assert code == 0 and out == ""
    assert json.loads(f.read_text())["quantity"] == "caratheodory"


def test_describe(capsys):
    code, out, _ = run(capsys, "describe")
    rec = json.loads(out)
    assert code == 0 and "sublevel-dcg" in rec["builtin_domains"]
    assert rec["exit_codes"]["soundness violation"] == 3


def test_seed_env(capsys, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "77")
    _, out, _ = run(capsys, "describe")
    assert json.loads(out)["config"]["seed"] == 77


def test_verify_single_suite_is_deterministic(capsys):
    a = run(capsys, "verify", "chain", "--seed", "5")
    b = run(capsys, "verify", "chain", "--seed", "5")
    assert a[0] == 0 and a[1] == b[1]
    assert json.loads(a[1])["passed"] is True


def test_pole_and_ratio_commands(capsys):
    code, out, _ = run(capsys, "classify-pole", "--domain", "bidisk", "--w", "0.2,0")
    assert code == 0 and json.loads(out)["classification"] == "Strict"
    code, out, _ = run(capsys, "ratio-test", "--w0", "0,0", "--excluded", "0.3")
    assert code == 0 and json.loads(out)["delta"] >= 0.01


def test_continuity_scan_command(capsys, tmp_path):
    from plurigreen.geometry import SublevelDcg

    S = SublevelDcg.default()
    f = tmp_path / "p.json"
    f.write_text(
        json.dumps({"path": [[[[0.5, 0], [c / 2, 0]], [[0, 0], [0, 0]]] for c in S.carr], "limit": [[[0.5, 0], [0, 0]], [[0, 0], [0, 0]]]})
    )
    code, out, _ = run(capsys, "continuity-scan", "--domain", "sublevel-dcg", "--path", str(f))
    assert code == 0 and json.loads(out)["verdict"] == "DISCONTINUITY WITNESS"


def test_compactify_command(capsys, tmp_path):
    m = tmp_path / "m.csv"
    code, out, _ = run(capsys, "compactify", "--resolution", "64", "--mobius", "-0.5", "--matrix", str(m))
    rec = json.loads(out)
    assert code == 0
    assert rec["partitions"]["0.5"] == [0, 1, 2]
    assert all(v == 0 for v in rec["invariance"]["edit_distance"].values())
    assert m.read_text().startswith("angle=0,")


def test_sigma_csv(capsys):
    code, out, _ = run(capsys, "sigma", "--w", "0,0", "--metric", "bergman_ball", "--format", "csv")
    assert code == 0 and out.count("\n") > 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "plurigreen", "green", "--z", "0.5,0", "--w", "0,0"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["quantity"] == "green"
