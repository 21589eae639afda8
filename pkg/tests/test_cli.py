import io
import json
import math

import numpy as np
import pytest

from ppsent import cli
from ppsent import io as ppio
from ppsent.correlation import mean_reduced_density
from ppsent.galois import PpsParams, build_pps_set, verify_properties
from ppsent.protocols import prepare_bell
from ppsent.states import tensor_product


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_angle():
    assert cli.parse_angle("pi/4") == pytest.approx(math.pi / 4)
    assert cli.parse_angle("-pi/4") == pytest.approx(-math.pi / 4)
    assert cli.parse_angle("3pi/2") == pytest.approx(1.5 * math.pi)
    assert cli.parse_angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert cli.parse_angle("-pi") == pytest.approx(-math.pi)
    assert cli.parse_angle("0.25") == 0.25
    with pytest.raises(cli.UsageError):
        cli.parse_angle("tau")


def test_chsh_example(capsys):
    code, out, _ = _run(["chsh", "--p", "3", "--s", "3",
                         "--angles", "0.7853981634,-0.7853981634,0,1.5707963268"], capsys)
    assert code == 0
    assert json.loads(out)["abs_B"] == pytest.approx(2.8284271247, abs=1e-9)


def test_chsh_symbolic_angles(capsys):
    code, out, _ = _run(["chsh", "--p", "3", "--s", "3", "--angles=pi/4,-pi/4,0,pi/2"], capsys)
    assert code == 0
    assert json.loads(out)["abs_B"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)


def test_ghz_example(capsys):
    code, out, _ = _run(["ghz", "--parties", "3", "--p", "3", "--s", "2",
                         "--angles", "1.0471975512,1.0471975512,1.0471975512"], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "theta_1,theta_2,theta_3,E_time,E_trace,E_formula"
    e_time = float(row.split(",")[3])
    assert e_time == pytest.approx(-1, abs=1e-9)


def test_verify_example(capsys):
    code, out, _ = _run(["verify", "--p", "2", "--s", "3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["report"]["orthogonality_max_dev"] <= 1e-9
    assert all(c["ok"] for c in rep["checks"])


def test_gen_json_schema_and_roundtrip(capsys):
    code, out, _ = _run(["gen", "--p", "3", "--s", "2"], capsys)
    assert code == 0
    doc = json.loads(out)
    d = doc["set"]
    assert (d["p"], d["s"], d["poly"]) == (3, 2, [1, 1, 2])
    labels = [tuple(e["label"]) for e in d["sequences"]]
    assert labels == sorted(labels) and len(labels) == 9
    pps = ppio.pps_set_from_dict(d)
    assert np.array_equal(pps.symbols, build_pps_set(PpsParams.default(3, 2)).symbols)
    assert verify_properties(pps).closure_ok


def test_bell_csv_grid(capsys):
    code, out, _ = _run(["bell", "--p", "3", "--s", "3", "--variant", "psi-", "--grid", "16"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "theta_1,theta_2,E_time,E_trace,E_formula"
    assert len(lines) == 1 + 256
    for line in lines[1:]:
        a, b, et, etr, ef = map(float, line.split(","))
        assert et == pytest.approx(-math.cos(a + b), abs=1e-9)


def test_bell_json_format(capsys):
    code, out, _ = _run(["bell", "--p", "3", "--s", "2", "--grid", "2", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 4 and set(rows[0]) == {"theta_1", "theta_2", "E_time", "E_trace", "E_formula"}


def test_bell_p2_skips_closed_form(capsys):
    code, out, _ = _run(["bell", "--p", "2", "--s", "3", "--grid", "4"], capsys)
    assert code == 0


def test_density_json(capsys):
    code, out, _ = _run(["density", "--p", "3", "--s", "3"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["dim"] == 4
    rho = ppio.density_from_dict(d)
    ref = mean_reduced_density(prepare_bell("psi+", build_pps_set(PpsParams.default(3, 3))))
    assert np.max(np.abs(rho.entries - ref.entries)) <= 1e-11


def test_not_demo_and_resources(capsys):
    code, out, _ = _run(["not-demo", "--p", "3", "--s", "2"], capsys)
    assert code == 0 and json.loads(out)["slot_operations"] == 9
    code, out, _ = _run(["resources", "--parties", "8", "--p", "3", "--s", "2"], capsys)
    assert code == 0 and json.loads(out)["sequences_used"] == 8


def test_usage_errors(capsys):
    assert _run(["verify", "--p", "4", "--s", "2"], capsys)[0] == 2
    assert _run(["resources", "--parties", "10", "--p", "3", "--s", "2"], capsys)[0] == 2
    assert _run(["chsh", "--angles", "0,0"], capsys)[0] == 2
    assert _run(["ghz", "--parties", "3", "--angles", "0,0"], capsys)[0] == 2
    assert _run(["verify", "--p", "2", "--s", "3", "--poly", "1,0,0,1"], capsys)[0] == 2
    code, _, err = _run(["bell", "--variant", "chi"], capsys)
    assert code == 2 and "chi" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_tolerance_failure_is_named_and_silent(capsys):
    code, out, err = _run(["ghz", "--parties", "6", "--p", "3", "--s", "2", "--angles=pi/6,pi/6,pi/6,pi/6,pi/6,pi/6"], capsys)
    assert code == 1
    assert out == ""
    assert err.startswith("FAIL: ghz-label-admissibility")
    code, out, err = _run(["verify", "--p", "3", "--s", "2", "--tolerance", "1e-30"], capsys)
    assert code == 1 and out == "" and "FAIL: balance" in err


def test_deterministic_output_files(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert cli.main(["bell", "--p", "3", "--s", "3", "--grid", "8", "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    j = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in j:
        assert cli.main(["gen", "--p", "5", "--s", "2", "-o", str(p)]) == 0
    assert j[0].read_bytes() == j[1].read_bytes()


def test_config_file_and_env_dir(tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": 3, "s": 2, "parties": 4, "angles": ["pi/2", "pi/2", 0, 0]}))
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "out"))
    assert cli.main(["ghz", "--config", str(cfg)]) == 0
    text = (tmp_path / "out" / "ghz.csv").read_text().strip().splitlines()
    assert float(text[1].split(",")[4]) == pytest.approx(-1, abs=1e-9)
    # flags override the config file
    assert cli.main(["ghz", "--config", str(cfg), "--angles", "0,0,0,0"]) == 0
    text = (tmp_path / "out" / "ghz.csv").read_text().strip().splitlines()
    assert float(text[1].split(",")[4]) == pytest.approx(1, abs=1e-9)
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["ghz", "--config", str(cfg)]) == 2


def test_run_with_config_object():
    out = io.StringIO()
    cfg = cli.RunConfig(command="chsh", p=2, s=3, angles=(math.pi / 4, -math.pi / 4, 0, math.pi / 2))
    assert cli.run(cfg, stdout=out) == 0
    assert json.loads(out.getvalue())["abs_B"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)


def test_general_state_json_roundtrip():
    pps = build_pps_set(PpsParams.default(3, 3))
    g = tensor_product(prepare_bell("phi-", pps))
    d = json.loads(ppio.dumps(ppio.general_state_to_dict(g)))
    assert d["F"] == 2 and d["global_label"] == list(g.global_label.coeffs)
    keys = [(t["bits"], t["label"]) for t in d["terms"]]
    assert keys == sorted(keys)
    back = ppio.general_state_from_dict(d, pps)
    assert np.max(np.abs(back.slot_vectors() - g.slot_vectors())) <= 1e-11
