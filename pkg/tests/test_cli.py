import csv
import json

import pytest

from sov6v.cli import RunConfig, emit_report, main, parse_config, report_json, run_suite
from sov6v.errors import ConfigError, InvalidModel
from sov6v.suites import DEFAULT_TOLERANCES, SUITE_ORDER, thread_count


def test_minimal_config_defaults():
    cfg = parse_config("{}")
    assert cfg == RunConfig()
    assert cfg.suites == SUITE_ORDER
    assert parse_config('{"N": 3, "x": 0, "y": 0}').params().N == 3


def test_round_trip():
    cfg = parse_config(json.dumps({"N": 2, "x": 1, "y": 1, "kappa": [[1, 0], [0.5, 1]], "seed": 11,
                                   "tolerances": {"rep.dybe": 1e-10}, "xi": [[0.3, 0.1], [1.7, -0.1]]}))
    again = parse_config(cfg.to_json())
    assert again == cfg
    assert again.kappa == (1 + 0j, 0.5 + 1j)
    assert again.xi == (0.3 + 0.1j, 1.7 - 0.1j)


def test_even_chain_rejects_zero_twist_class():
    with pytest.raises(InvalidModel):
        parse_config('{"N": 2, "x": 0, "y": 0}')


def test_colliding_inhomogeneities_named():
    eta = RunConfig().eta
    xi = [[0.4, 0.0], [0.4 + eta.real, eta.imag]]
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps({"N": 2, "xi": xi}))
    assert "(a=" in str(exc.value) and "b=" in str(exc.value)


@pytest.mark.parametrize("text,field", [
    ('{"N": "two"}', "N"),
    ('{"N": 2, "xi": [[0.1, 0]]}', "xi"),
    ('{"kappa": [[0, 0]]}', "kappa[0]"),
    ('{"suites": ["nope"]}', "suites[0]"),
    ('{"tolerances": {"rep.nothing": 1}}', "tolerances.rep.nothing"),
    ('{"colour": 1}', "colour"),
    ('{"omega": [0, -1]}', "omega"),
    ('[1, 2]', "<root>"),
    ('{"tol": -1}', "tol"),
])
def test_config_errors_carry_field_path(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert str(exc.value).startswith(field)


def test_tolerance_keys_are_known():
    assert all(k.split(".")[0] in {"theta", "rep", "sov", "spectrum", "tq", "tqinhom", "ff"}
               for k in DEFAULT_TOLERANCES)


def test_empty_suite_list(tmp_path):
    cfg = parse_config(json.dumps({"suites": [], "out": str(tmp_path)}))
    report = run_suite(cfg)
    assert report["status"] == "PASS" and report["tables"] == {}
    assert emit_report(report, tmp_path) == [tmp_path / "report.json"]


def test_spectrum_table(tmp_path):
    cfg = parse_config(json.dumps({"N": 2, "suites": ["spectrum"]}))
    report = run_suite(cfg)
    assert report["status"] == "PASS"
    emit_report(report, tmp_path)
    rows = list(csv.reader(open(tmp_path / "eigenvalues.csv")))
    assert len(rows) == 1 + 4
    assert rows[0][0] == "index"


def test_form_factor_table_size(tmp_path):
    cfg = parse_config(json.dumps({"N": 2, "x": 1, "y": 0, "suites": ["formfactors"]}))
    report = run_suite(cfg)
    emit_report(report, tmp_path)
    rows = list(csv.reader(open(tmp_path / "form_factors.csv")))
    # one row per (t, t', site, operator): 4 * 4 * 2 * (2 spin + 3 height)
    assert len(rows) - 1 == 160


def test_report_is_deterministic(tmp_path):
    cfg = parse_config(json.dumps({"N": 2, "suites": ["elliptic", "repspace", "spectrum"], "seed": 5}))
    one = report_json(run_suite(cfg))
    two = report_json(run_suite(cfg, threads=3))
    assert one == two


def test_failing_check_reported(tmp_path):
    cfg = parse_config(json.dumps({"N": 2, "suites": ["elliptic"], "tolerances": {"theta.frobenius": 1e-30}}))
    report = run_suite(cfg)
    assert report["status"] == "FAIL"
    failed = [c["id"] for s in report["suites"] for c in s["checks"] if c["status"] == "FAIL"]
    assert failed == ["theta.frobenius"]


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"N": 2, "suites": ["elliptic"]}))
    out = tmp_path / "out"
    assert main(["verify", "--config", str(good), "--out", str(out), "--seed", "3"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["seed"] == 3
    assert [s["name"] for s in report["suites"]] == ["elliptic", "repspace", "sovbasis", "spectrum"]

    strict = tmp_path / "strict.json"
    strict.write_text(json.dumps({"N": 2, "tolerances": {"theta.interpolation": 1e-40}}))
    assert main(["verify", "--config", str(strict), "--out", str(tmp_path / "o2")]) == 1

    bad = tmp_path / "bad.json"
    bad.write_text('{"N": 2, "x": 0, "y": 0}')
    assert main(["spectrum", "--config", str(bad)]) == 2
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2

    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["spectrum", "--config", str(good), "--out", str(blocker / "sub")]) == 3
    capsys.readouterr()


def test_kappa_flag_repeatable(tmp_path):
    out = tmp_path / "k"
    assert main(["spectrum", "--kappa", "1,0", "--kappa", "0.5,1", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["kappa"] == [[1.0, 0.0], [0.5, 1.0]]


def test_bad_flag_values_exit_through_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--kappa", "0,0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["spectrum", "--seed", "-1"])


def test_thread_count(monkeypatch):
    monkeypatch.setenv("SOV6V_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("SOV6V_THREADS", "zero")
    assert thread_count() == 1
    monkeypatch.delenv("SOV6V_THREADS")
    assert thread_count() == 1
