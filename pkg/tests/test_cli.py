import json
import subprocess
import sys

import pytest

from classmoments.cli import EXIT_CROSSCHECK, EXIT_OK, EXIT_VALIDATION, main
from classmoments.fixtures import BUILTIN, fixture_spec, load_fixture, spec_hash
from classmoments.quadfield import read_table


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_code_contract():
    assert (EXIT_OK, EXIT_VALIDATION, EXIT_CROSSCHECK) == (0, 2, 3)


def test_exponent_s4(capsys):
    code, out, _ = run(capsys, "exponent", "--fixture", "s4-deg12", "--beta", "1", "--beta", "3/2")
    assert code == 0
    rep = json.loads(out)
    assert rep["rho_max"]["1"] == 2
    assert rep["group_order"] == 648 and rep["index"] == 4
    assert rep["manifest"]["fixture_sha256"] == spec_hash(fixture_spec("s4-deg12"))


def test_exponent_s3(capsys):
    code, out, _ = run(capsys, "exponent", "--fixture", "s3-nongalois", "--beta", "2")
    assert code == 0 and json.loads(out)["rho_max"]["2"] == 14


def test_exponent_c7c3_cusp(capsys):
    code, out, _ = run(capsys, "exponent", "--fixture", "c7c3", "--beta", "1")
    assert code == 0
    rep = json.loads(out)
    nonzero = {k: v for k, v in rep["rho_cusp"].items() if k != "(0,)"}
    assert nonzero and all(v["1"] == 1 for v in nonzero.values())


def test_cusp_classify_quadratic(capsys):
    code, out, _ = run(capsys, "cusp-classify", "--disc", "-39")
    assert code == 0
    rep = json.loads(out)
    for s in rep["sigmas"]:
        assert s["vanishes"] == s["structural"]
    assert sum(s["vanishes"] for s in rep["sigmas"]) == 2


def test_cusp_classify_csv(capsys):
    code, out, err = run(capsys, "cusp-classify", "--fixture", "c7c3", "--format", "csv", "--beta", "3/4")
    assert code == 0
    assert out.splitlines()[0] == "sigma,vanishes,3/4"
    assert json.loads(err)["command"] == "cusp-classify"


def test_quad_writes_table(tmp_path, capsys):
    out = tmp_path / "d23.bin"
    code, _, _ = run(capsys, "quad", "--disc", "-23", "--xmax", "1000", "--out", str(out))
    assert code == 0
    header, counts = read_table(out)
    assert header["h"] == 3 and header["f"] == 1
    manifest = json.loads((tmp_path / "d23.bin.manifest.json").read_text())
    assert manifest["h"] == 3 and manifest["manifest"]["xmax"] == 1000


def test_eta_verify(capsys):
    code, out, _ = run(capsys, "eta-verify", "--xmax", "5000")
    assert code == 0
    assert json.loads(out)["matches"] == 5000


def test_moments_json(tmp_path, capsys):
    out = tmp_path / "m.json"
    code, _, _ = run(capsys, "moments", "--disc", "-23", "--xmax", "200000", "--source", "class:1", "--power", "1", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    assert set(rep["estimates"]) == {"log-fit", "dirichlet-fit"}
    assert rep["series"][-1]["x"] == 200000
    assert (tmp_path / "m.json.manifest.json").exists()


def test_moments_csv_schema(capsys):
    code, out, _ = run(capsys, "moments", "--disc", "-23", "--xmax", "100000", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "x,S,domain,power,source"


def test_synthetic_deterministic(tmp_path, capsys):
    paths = [tmp_path / f"s{i}.csv" for i in range(2)]
    for p in paths:
        argv = ["synthetic", "--fixture", "cubic-v4", "--xmax", "100000", "--seed", "4", "--source", "cusp:1"]
        assert run(capsys, *argv, "--format", "csv", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    manifest = json.loads((tmp_path / "s0.csv.manifest.json").read_text())
    assert manifest["seed"] == 4 and manifest["fixture"] == "cubic-v4"


@pytest.mark.slow
def test_synthetic_cubic_v4_cusp_slope(capsys):
    argv = ["synthetic", "--fixture", "cubic-v4", "--xmax", "10000000", "--seed", "0"]
    code, out, _ = run(capsys, *argv, "--source", "cusp:1", "--filter", "squarefree")
    assert code == 0
    rho = json.loads(out)["estimates"]["log-fit"]["rho_hat"]
    assert abs(rho - 1) <= 0.25


def test_fixtures_list_and_dump_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0 and set(BUILTIN) <= set(out.split())
    for name in BUILTIN:
        p = tmp_path / f"{name}.json"
        assert run(capsys, "fixtures", "dump", "--fixture", name, "--out", str(p))[0] == 0
        a, b = load_fixture(name), load_fixture(str(p))
        assert a.G.order == b.G.order and a.class_sizes == b.class_sizes and a.index == b.index
        assert a.N.factors == b.N.factors


def test_validation_errors(capsys):
    assert run(capsys, "exponent")[0] == EXIT_VALIDATION
    assert run(capsys, "exponent", "--fixture", "no-such-fixture")[0] == EXIT_VALIDATION
    assert run(capsys, "quad", "--disc", "-5", "--xmax", "10")[0] == EXIT_VALIDATION
    assert run(capsys, "moments", "--disc", "-23", "--xmax", "1000", "--source", "bogus:1")[0] == EXIT_VALIDATION
    # the s3 frame is not a normal tower: H = Stab(2) is not normal in S3
    assert run(capsys, "cusp-classify", "--fixture", "s3-nongalois")[0] == EXIT_VALIDATION


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "classmoments", "fixtures", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "c7c3" in res.stdout
    res = subprocess.run([sys.executable, "-m", "classmoments", "exponent", "--beta", "x/y", "--fixture", "c7c3"], capture_output=True, text=True)
    assert res.returncode == EXIT_VALIDATION
