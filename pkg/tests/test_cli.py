import json
from fractions import Fraction

from assoclab.cli import EXIT_CHECK, EXIT_IO, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_etingof(tmp_path, capsys):
    out = tmp_path / "et.json"
    code, payload = run(capsys, "etingof", "--out", str(out))
    assert code == EXIT_OK
    assert payload["c_a"] == ["1199", "309657600"]
    assert payload["c_b"] == ["283", "103219200"]
    assert payload["strong_form_fails"] is True
    assert json.loads(out.read_text())["c_a"] == ["1199", "309657600"]


def test_check(capsys):
    code, payload = run(capsys, "check")
    assert code == EXIT_OK
    assert payload["passed"] is True


def test_gc_cocycle_and_phi(capsys):
    code, payload = run(capsys, "gc", "cocycle", "tetrahedron")
    assert code == EXIT_OK and payload["closed"] is True
    code, payload = run(capsys, "gc", "phi", "tetrahedron", "--order", "4")
    assert code == EXIT_OK
    res = payload["grt_residuals"]
    assert res["antisymmetry"] == 0 and res["hexagon"] == 0 and res["pentagon"] == 0
    code, payload = run(capsys, "gc", "divergence", "tetrahedron")
    assert code == EXIT_OK and payload["divergence_free"] is True
    # the bare 5-wheel is not closed: check-failure exit
    code, _ = run(capsys, "gc", "cocycle", "wheel5")
    assert code == EXIT_CHECK


def test_gc_file_input(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": 4,
                                "edges": [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]]}))
    code, payload = run(capsys, "gc", "cocycle", "-", "--in", str(path))
    assert code == EXIT_OK and payload["closed"] is True


def test_unknown_graph_is_io_error(capsys):
    code, _ = run(capsys, "gc", "cocycle", "nonexistent")
    assert code == EXIT_IO


def test_mzv_and_cache(tmp_path, capsys):
    code, payload = run(capsys, "mzv", "2,1", "--tol", "1e-10",
                        "--cache-dir", str(tmp_path))
    assert code == EXIT_OK
    assert abs(payload["value"] - 1.2020569031595942) < 1e-9
    assert any(p.name.startswith("mzv-2-1") for p in tmp_path.iterdir())
    # second call hits the cache
    code, payload2 = run(capsys, "mzv", "2,1", "--tol", "1e-10",
                         "--cache-dir", str(tmp_path))
    assert payload2["value"] == payload["value"]


def test_kz_command(tmp_path, capsys):
    out = tmp_path / "kz.json"
    code, payload = run(capsys, "kz", "--order", "3", "--series-order", "48",
                        "--tol", "1e-8", "--cache-dir", str(tmp_path),
                        "--out", str(out))
    assert code == EXIT_OK
    assert payload["passed"] is True
    assert payload["residuals"]["pentagon"] < 1e-8
    assert out.exists()
    # cached rerun
    code, _ = run(capsys, "kz", "--order", "3", "--series-order", "48",
                  "--tol", "1e-8", "--cache-dir", str(tmp_path))
    assert code == EXIT_OK


def test_kz_bad_output_path(tmp_path, capsys):
    code, _ = run(capsys, "kz", "--order", "3", "--series-order", "48",
                  "--tol", "1e-8", "--cache-dir", str(tmp_path),
                  "--out", str(tmp_path / "no" / "such" / "dir" / "x.json"))
    assert code == EXIT_IO


def test_interp_command(tmp_path, capsys):
    code, payload = run(capsys, "interp", "--order", "3", "--series-order", "48",
                        "--t", "1.0", "--tol", "1e-8", "--cache-dir", str(tmp_path))
    assert code == EXIT_OK
    assert payload["passed"] is True
    lam = complex(payload["lambda"]["re"], payload["lambda"]["im"])
    assert abs(lam.real) < 1e-12 and abs(lam.imag) > 0.1


def test_weights_command(tmp_path, capsys):
    code, payload = run(capsys, "weights", "--graph", "tetrahedron",
                        "--t", "0.5", "--tol", "1e-4", "--budget", "4000",
                        "--out", str(tmp_path / "w.json"))
    assert code == EXIT_OK
    w = payload["weight"]["value"]
    assert w["re"] != 0
    assert payload["prefactor"] == ["1", "8"]
    ratio = Fraction(int(payload["lambda_ratio"][0]), int(payload["lambda_ratio"][1]))
    assert ratio == 16
