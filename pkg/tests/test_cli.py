import json
import subprocess
import sys


from fractions import Fraction
from hnrel.cli import main, parse_eta
from hnrel.relgen import BundleData, build_ring


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(no_floats(v) for v in obj)
    return True


def test_betti_json(capsys):
    code, out, _ = run(capsys, "betti", "--n", "2", "--d", "1", "--g", "2", "--cap", "12")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == "hnrel.cli.betti/1"
    assert d["p_moduli"] == [1, 4, 7, 12, 24, 32, 24, 12, 7, 4, 1]
    assert no_floats(d)


def test_betti_csv_and_closed(capsys):
    code, out, _ = run(capsys, "betti", "--n", "2", "--d", "1", "--g", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "power,coefficient" and lines[4] == "3,12" and len(lines) == 12
    code, out, _ = run(capsys, "betti", "--n", "2", "--d", "1", "--g", "2", "--closed")
    fd = json.loads(out)["closed"]["first_difference"]
    assert fd == {"closed": 11, "moduli": 12, "power": 3}


def test_cap_overflow_exit_3(capsys):
    code, _, err = run(capsys, "betti", "--n", "2", "--d", "1", "--g", "2", "--cap", "8")
    assert code == 3
    assert json.loads(err)["minimal_cap"] == 10
    code, _, err = run(capsys, "relations", "--n", "2", "--d", "1", "--g", "2", "--nhat", "1", "--dhat", "1", "--cap", "6")
    assert code == 3 and json.loads(err)["minimal_cap"] == 12


def test_env_default_cap(capsys, monkeypatch):
    monkeypatch.setenv("HNREL_CAP", "9")
    code, _, err = run(capsys, "betti", "--n", "2", "--d", "1", "--g", "2")
    assert code == 3 and json.loads(err)["minimal_cap"] == 10


def test_validation_exit_2(capsys):
    code, _, err = run(capsys, "betti", "--n", "2", "--d", "0", "--g", "2", "--cap", "12")
    assert code == 2 and json.loads(err)["error"] == "validation"
    code, _, err = run(capsys, "betti", "--n", "2")
    assert code == 2 and json.loads(err)["error"] == "usage"
    code, _, err = run(capsys, "relations", "--n", "2", "--d", "1", "--g", "2", "--nhat", "1", "--dhat", "2")
    assert code == 2
    code, _, err = run(capsys, "parabolic", "--n", "2", "--d", "1", "--weights", "0", "--mults", "2", "--rank")
    assert code == 2


def test_strata(capsys):
    code, out, _ = run(capsys, "strata", "--n", "2", "--d", "1", "--g", "2", "--codim-cap", "8")
    assert code == 0
    assert [t["codim"] for t in json.loads(out)["types"]] == [0, 2, 4, 6, 8]


def test_relations_window(capsys):
    code, out, _ = run(capsys, "relations", "--n", "2", "--d", "1", "--g", "2", "--nhat", "1", "--dhat", "1", "--window")
    assert code == 0
    d = json.loads(out)
    assert [r["r"] for r in d["records"]] == [4, 5, 6]
    for rec in d["records"]:
        for e in rec["entries"]:
            for t in e["value"]:
                assert isinstance(t["coeff"], str)
    assert no_floats(d)


def test_pairing(capsys):
    code, out, _ = run(capsys, "pairing", "--n", "1", "--d", "1", "--g", "2", "--nhat", "2", "--dhat", "1", "--tcap", "6")
    assert code == 0
    coeffs = json.loads(out)["series"]["coefficients"]
    assert coeffs[5] == [{"coeff": "-1/2", "monomial": []}]
    code, out, _ = run(
        capsys, "pairing", "--n", "1", "--d", "1", "--g", "2", "--nhat", "2", "--dhat", "1",
        "--tcap", "6", "--eps-order", "1",
    )
    d = json.loads(out)
    assert [t["eps_exponents"] for t in d["terms"]] == [[0], [1]]
    code, _, err = run(
        capsys, "pairing", "--n", "1", "--d", "1", "--g", "2", "--nhat", "2", "--dhat", "1",
        "--eps-order", "1", "--eps", "0",
    )
    assert code == 2


def test_parse_eta():
    ring = build_ring([BundleData(2, 1, 2, "h")], 10)
    x = parse_eta("2*ah_1^2*bh_1_1 + -1/3*ah_2", ring)
    want = (ring.gen("ah_1") ** 2 * ring.gen("bh_1_1")).scale(2) - ring.gen("ah_2").scale(Fraction(1, 3))
    assert x == want
    assert parse_eta("1", ring) == ring.one()


def test_parabolic(capsys):
    code, out, _ = run(
        capsys, "parabolic", "--n", "2", "--d", "1", "--g", "2", "--weights", "0,1/2", "--mults", "1,1",
        "--rank", "--window", "--sub", "1,1,0:1", "--check-good",
    )
    assert code == 0
    d = json.loads(out)
    assert d["rank"] == 4 and d["window"] == [5, 6, 7]
    code, out, _ = run(capsys, "parabolic", "--n", "2", "--d", "0", "--weights", "0", "--mults", "2", "--check-good")
    w = json.loads(out)["good_data"]["witnesses"][0]
    assert (w["nhat"], w["dhat"]) == (1, 0)


def test_determinism_and_out_file(capsys, tmp_path):
    argv = ["relations", "--n", "2", "--d", "1", "--g", "2", "--nhat", "1", "--dhat", "1"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    path = tmp_path / "rel.json"
    assert main(["--out", str(path)] + argv) == 0
    assert path.read_text() == first


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    assert all("seconds" in s for s in d["suites"])
    code, out, _ = run(capsys, "selftest", "--mutate", "koszul")
    d = json.loads(out)
    assert code == 1
    failed = {s["suite"] for s in d["suites"] if not s["ok"]}
    assert "koszul" in failed


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "hnrel", "strata", "--n", "1", "--d", "0", "--g", "2"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["types"][0]["blocks"] == [[1, 0]]
