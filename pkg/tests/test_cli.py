import json
import re

from gztower.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_report(out):
    return json.loads(out)


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_classical_gz_ok(capsys):
    code, out, err = run_cli(capsys, "verify-classical", "--n", "2", "--family", "gz")
    assert code == 0
    report = parse_report(out)
    assert report["status"] == "ok"
    assert report["schema"] == "gz-tower/1"
    assert report["commutation"]["status"] == "ok"
    assert report["independence"]["expected"] == 4
    assert report["trivial"]["status"] == "ok"
    assert "verify-classical: ok" in err


def test_classical_mf_ok(capsys):
    code, out, _ = run_cli(capsys, "verify-classical", "--n", "3", "--family", "mf",
                           "--shift-matrix", "random-rational", "--seed", "3")
    assert code == 0
    assert parse_report(out)["commutation"]["status"] == "ok"


def test_classical_gz_n3(capsys):
    code, out, _ = run_cli(capsys, "verify-classical", "--n", "3", "--family", "gz")
    assert code == 0
    assert parse_report(out)["status"] == "ok"


def test_classical_trivial_only(capsys):
    code, out, _ = run_cli(capsys, "verify-classical", "--n", "2",
                           "--family", "trivial", "--points", "3")
    assert code == 0
    assert parse_report(out)["trivial"]["status"] == "ok"


def test_invalid_ambient_size_is_config_error(capsys):
    code, _, err = run_cli(capsys, "verify-classical", "--n", "0")
    assert code == 2
    assert "configuration error" in err


def test_quantum_ok_and_convention(capsys):
    code, out, _ = run_cli(capsys, "verify-quantum", "--n", "2")
    assert code == 0
    report = parse_report(out)
    assert report["convention"] == "nested"
    assert report["quantum"]["status"] == "ok"
    assert report["diffop_realization"]["status"] == "ok"


def test_quantum_size_guard(capsys):
    code, _, err = run_cli(capsys, "verify-quantum", "--n", "5")
    assert code == 2
    assert "configuration error" in err


def test_orbit_ok(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--n", "3", "--spectrum", "1,2,3",
                           "--seed", "7")
    assert code == 0
    report = parse_report(out)
    assert report["status"] == "ok"
    assert report["canonical_chart"]["winner"] == "rows+"
    assert report["chart_residuals"]["status"] == "ok"
    assert len(report["tower"]["levels"]) == 3


def test_orbit_repeated_spectrum_is_config_error(capsys):
    code, _, err = run_cli(capsys, "orbit", "--n", "3", "--spectrum", "1,1,3")
    assert code == 2
    assert "configuration error" in err


def test_orbit_spectrum_length_mismatch(capsys):
    code, _, _ = run_cli(capsys, "orbit", "--n", "3", "--spectrum", "1,2")
    assert code == 2


def test_orbit_residue_form_check(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--n", "2", "--spectrum", "0.5,-1+0.5j",
                           "--seed", "3", "--check", "residue-form", "--pairs", "6")
    assert code == 0
    report = parse_report(out)
    assert report["residue_form"]["status"] == "ok"
    assert report["residue_form"]["winner"].startswith("contour=A")


def test_orbit_action_angle_check_and_table(capsys):
    code, out, _ = run_cli(capsys, "orbit", "--n", "2", "--spectrum", "0.5,-1+0.5j",
                           "--seed", "3", "--check", "action-angle")
    assert code == 0
    report = parse_report(out)
    assert report["action_angle"]["status"] == "ok"
    # the canonicity report carries the full bracket table of the winner
    table = report["canonical_chart"]["table"]
    val = complex(*table["gamma[1,1]|theta[1,1]"])
    assert abs(val + 1.0) < 1e-5


def test_flow_ok_and_trajectory(tmp_path, capsys):
    traj = tmp_path / "traj.jsonl"
    code, out, _ = run_cli(capsys, "flow", "--n", "2", "--spectrum", "0.5,-1+0.5j",
                           "--seed", "3", "--hamiltonian", "1,1",
                           "--t", "0.1", "--steps", "100",
                           "--trajectory", str(traj))
    assert code == 0
    report = parse_report(out)
    assert report["status"] == "ok"
    assert report["linearization"]["status"] == "ok"
    assert report["conservation"]["status"] == "ok"
    lines = traj.read_text().strip().splitlines()
    assert len(lines) == report["samples"]
    record = json.loads(lines[0])
    assert set(record) == {"t", "u", "h", "tau", "branch_flags"}


def test_flow_regularity_loss_reports_time(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "flow", "--n", "2", "--spectrum", "0.5,-1+0.5j",
                           "--seed", "3", "--hamiltonian", "1,1",
                           "--trajectory", str(tmp_path / "t.jsonl"),
                           "--tolerance", "regularity=1e6")
    assert code == 1
    report = parse_report(out)
    assert report["status"] == "violation"
    assert report["error"]["kind"] == "regularity-lost"
    assert report["error"]["time"] == 0.0


def test_flow_bad_selector(capsys):
    code, _, _ = run_cli(capsys, "flow", "--n", "2", "--spectrum", "0.5,-1",
                         "--hamiltonian", "5,1")
    assert code == 2


# ---------------------------------------------------------------------------
# report hygiene
# ---------------------------------------------------------------------------

def _strip_timestamp(text):
    return re.sub(r'"timestamp": "[^"]*"', '"timestamp": null', text)


def test_reports_are_deterministic(capsys):
    _, out1, _ = run_cli(capsys, "orbit", "--n", "2", "--spectrum", "1,-1",
                         "--seed", "5", "--check", "residue-form", "--pairs", "4")
    _, out2, _ = run_cli(capsys, "orbit", "--n", "2", "--spectrum", "1,-1",
                         "--seed", "5", "--check", "residue-form", "--pairs", "4")
    assert _strip_timestamp(out1) == _strip_timestamp(out2)


def test_report_embeds_full_config(capsys):
    _, out, _ = run_cli(capsys, "verify-classical", "--n", "2", "--family", "gz",
                        "--seed", "9")
    config = parse_report(out)["config"]
    assert config["command"] == "verify-classical"
    assert config["n"] == 2
    assert config["seed"] == 9
    assert config["family"] == "gz"


def test_output_file_and_env_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GZTOWER_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run_cli(capsys, "verify-classical", "--n", "2", "--family", "gz",
                           "--output", "report.json")
    assert code == 0
    assert out == ""
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["status"] == "ok"
