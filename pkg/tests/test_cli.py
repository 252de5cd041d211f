import csv
import io
import json

import pytest

from coolsim.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_VALIDATION,
    SWEEP_FIELDS,
    cmd_sweep,
    main,
    parse_grid,
    read_trace_rows,
    trace_from_rows,
    write_trace,
)
from coolsim.protocols import run_noe_based_hbac, run_sr_gamma3

from conftest import tanh_multiple


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_srg2(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "srg2", "--eps-b", "0.1", "--rounds", "50")
    assert code == EXIT_OK
    rows = _rows(out)
    assert list(rows[0]) == ["round", "qubit", "polarization"]
    last = [r for r in rows if r["round"] == "50" and r["qubit"] == "1"]
    assert float(last[0]["polarization"]) == pytest.approx(tanh_multiple(3, 0.1), abs=1e-12)


def test_run_ppa_two_qubits_has_no_gain(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "ppa", "--n", "2", "--eps-b", "0.3",
                        "--rounds", "10")
    assert code == EXIT_OK
    target = [float(r["polarization"]) for r in _rows(out) if r["qubit"] == "1"]
    assert len(target) == 11
    assert target == pytest.approx([0.3] * 11, abs=1e-15)


def test_run_zero_rounds(capsys):
    _, out, _ = _run(capsys, "run", "--protocol", "srg3", "--eps-b", "0.2", "--rounds", "0")
    rows = _rows(out)
    assert {r["round"] for r in rows} == {"0"}
    assert len(rows) == 3


def test_run_is_deterministic(tmp_path):
    paths = [tmp_path / f"t{i}.csv" for i in range(2)]
    for p in paths:
        assert main(["run", "--protocol", "noe_hbac", "--n", "4", "--eps-b", "0.01",
                     "--rounds", "8", "-o", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("fmt_name", ["csv", "json"])
def test_trace_round_trip(fmt_name):
    for trace in (run_sr_gamma3(0.137, 7), run_noe_based_hbac(4, 3e-3, 6, "full_sort")):
        buf = io.StringIO()
        write_trace(trace, buf, fmt_name)
        buf.seek(0)
        back = trace_from_rows(trace.protocol, read_trace_rows(buf, fmt_name))
        assert back.rounds == trace.rounds


def test_json_output(capsys):
    code, out, _ = _run(capsys, "run", "--protocol", "noe", "--eps-b", "0.1", "--rounds", "3",
                        "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["protocol"] == "noe"
    assert set(doc["rows"][0]) == {"round", "qubit", "polarization"}
    assert len(doc["rows"]) == 8


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"protocol": "ppa", "n": 3, "eps_b": 0.2, "rounds": 4}))
    _, out, _ = _run(capsys, "run", "--config", str(cfg))
    rows = _rows(out)
    assert max(int(r["round"]) for r in rows) == 4
    assert max(int(r["qubit"]) for r in rows) == 3
    _, out, _ = _run(capsys, "run", "--config", str(cfg), "--rounds", "2", "--n", "4")
    rows = _rows(out)
    assert max(int(r["round"]) for r in rows) == 2
    assert max(int(r["qubit"]) for r in rows) == 4


@pytest.mark.parametrize("argv", [
    ["run", "--protocol", "srg2", "--n", "3", "--eps-b", "0.1"],
    ["run", "--protocol", "srg2", "--eps-b", "1.5"],
    ["run", "--protocol", "srg2"],
    ["run", "--protocol", "nope", "--eps-b", "0.1"],
    ["predict", "--formula", "ppa", "--n", "1", "--eps-b", "0.1"],
    ["sweep", "--protocols", "srg2", "--grid", "0.1:0.2"],
    [],
])
def test_invalid_input_exit_code(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == EXIT_INPUT
    assert out == ""
    assert len(err.strip().splitlines()) == 1


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"speed": 3}))
    code, _, err = _run(capsys, "run", "--config", str(cfg), "--eps-b", "0.1")
    assert code == EXIT_INPUT
    assert "speed" in err


@pytest.mark.parametrize("argv, expected", [
    (["--formula", "sr", "--n", "3", "--eps-b", "0.1"], tanh_multiple(7, 0.1)),
    (["--formula", "ppa", "--n", "2", "--eps-b", "0.42"], 0.42),
    (["--formula", "gnoe", "--n", "4", "--eps-b", "1e-4"], 4e-4),
    (["--formula", "sr2", "--k", "1", "--eps-b", "0.1"], tanh_multiple(2, 0.1)),
])
def test_predict(capsys, argv, expected):
    code, out, _ = _run(capsys, "predict", *argv)
    assert code == EXIT_OK
    assert float(out) == pytest.approx(expected, rel=1e-11)


def test_parse_grid():
    assert parse_grid("0.1:0.3:3") == pytest.approx([0.1, 0.2, 0.3])
    assert parse_grid("0.5:0.5:1") == [0.5]
    for bad in ("0.1:0.3", "a:b:c", "0.1:0.3:0"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_sweep_two_qubit_ordering(capsys):
    code, out, _ = _run(capsys, "sweep", "--protocols", "srg2,noe,ppa", "--n", "2",
                        "--grid", "0.01:0.9:20")
    assert code == EXIT_OK
    assert out.splitlines()[0] == ",".join(SWEEP_FIELDS)
    rows = _rows(out)
    assert [(r["protocol"], float(r["eps_b"])) for r in rows] == sorted(
        (r["protocol"], float(r["eps_b"])) for r in rows)
    by = {(r["protocol"], r["eps_b"]): float(r["eps_max_sim"]) for r in rows}
    for eps in {r["eps_b"] for r in rows}:
        assert by[("srg2", eps)] >= by[("noe", eps)] >= by[("ppa", eps)]
    for r in rows:
        assert r["flag"] == "ok"
        if r["protocol"] == "srg2":
            assert float(r["abs_err"]) < 1e-6


def test_sweep_skips_invalid_pairs_and_is_ordered():
    rows = cmd_sweep(["srgn", "ppa", "srg2"], [2, 3], [0.2, 0.1])
    keys = [(r["protocol"], r["n"], r["eps_b"]) for r in rows]
    assert keys == sorted(keys)
    assert ("srg2", 3, 0.1) not in keys
    assert len(rows) == 10


def test_sweep_parallel_matches_serial():
    serial = cmd_sweep(["srgn", "ppa"], [3, 4], [0.05, 0.3])
    parallel = cmd_sweep(["srgn", "ppa"], [3, 4], [0.05, 0.3], jobs=2)
    assert serial == parallel


def test_sweep_flags_nonconvergence():
    rows = cmd_sweep(["ppa"], [6], [0.01], max_rounds=3)
    assert rows[0]["flag"] == "nonconverged"
    assert rows[0]["rounds_used"] == 3


def test_validate(capsys):
    code, out, _ = _run(capsys, "validate", "--seed", "7")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "8/8 checks passed"
    _, again, _ = _run(capsys, "validate", "--seed", "7")
    assert out == again


def test_validate_negative_control(capsys):
    code, out, _ = _run(capsys, "validate", "--corrupt-kraus")
    assert code == EXIT_VALIDATION
    assert "FAIL kraus_completeness" in out


def test_logging_goes_to_stderr_only(capsys, monkeypatch):
    monkeypatch.setenv("COOLSIM_LOG", "debug")
    code, out, _ = _run(capsys, "predict", "--formula", "noe", "--eps-b", "0.1")
    assert code == EXIT_OK
    assert out.strip() == f"{40 / 202:.12g}"
