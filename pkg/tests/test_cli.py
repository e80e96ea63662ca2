"""Command-line interface: exit codes, output formats, config handling,
reproducibility."""

import csv
import io
import json
import contextlib

import pytest

from fermiflow.cli import RunConfig, main


def run_cli(args):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(args))
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL_LEMMA = "verify_lemma.dim=4\nverify_lemma.n=2\nverify_lemma.seeds=2\nverify_lemma.draws=2000\n"


def parse_json(out):
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert set(doc) == {"schema_version", "command", "seed", "timestamp", "report"}
    return doc


def strip_timestamp(out):
    return "\n".join(line for line in out.splitlines() if '"timestamp"' not in line)


def test_verify_lemma_small_run_passes(tmp_path):
    cfg = write_config(tmp_path, SMALL_LEMMA)
    code, out, _ = run_cli(["verify-lemma", "--config", cfg])
    assert code == 0
    doc = parse_json(out)
    assert doc["command"] == "verify-lemma"
    assert doc["report"]["passed"] is True
    assert doc["report"]["worst_inclusion_dev"] <= 1e-9
    assert doc["report"]["worst_mass_dev"] <= 1e-10


def test_verify_lemma_corrupt_kernel_fails(tmp_path):
    cfg = write_config(tmp_path, SMALL_LEMMA)
    code, out, _ = run_cli(["verify-lemma", "--config", cfg, "--corrupt"])
    assert code == 1
    assert json.loads(out)["report"]["passed"] is False


def test_verify_lemma_cap_exceeded(tmp_path):
    cfg = write_config(tmp_path, SMALL_LEMMA + "enumeration_cap=10\n")
    code, out, err = run_cli(["verify-lemma", "--config", cfg])
    assert code == 2
    assert "cap" in err


def test_config_parse_error_reports_line(tmp_path):
    cfg = write_config(tmp_path, "verify_lemma.dim=4\nnot a pair\n")
    code, _, err = run_cli(["verify-lemma", "--config", cfg])
    assert code == 2
    assert ":2:" in err


def test_config_rejects_bad_format(tmp_path):
    cfg = write_config(tmp_path, "format=yaml\n")
    code, _, err = run_cli(["walsh", "--config", cfg])
    assert code == 2


def test_config_rejects_nonpositive_cap(tmp_path):
    cfg = write_config(tmp_path, "enumeration_cap=0\n")
    code, _, err = run_cli(["walsh", "--config", cfg])
    assert code == 2


def test_unknown_flag_is_a_usage_error():
    code, _, _ = run_cli(["walsh", "--frobnicate"])
    assert code == 2


def test_walsh_json_values():
    code, out, _ = run_cli(["walsh"])
    assert code == 0
    rep = parse_json(out)["report"]
    assert rep["covariance_adjacent_cells"] == -0.25
    assert rep["covariance_adjacent_cells_alt"] == 0.0
    assert rep["density_transport_rhs"] == 0.0
    assert rep["tv_exact"] == 0.5
    assert rep["wsharp_exact"] == 0.5
    assert rep["tv_bound"] == 1.0
    assert rep["wsharp_bound"] == pytest.approx(1.7320508075688772)
    assert rep["passed"] is True


def test_walsh_csv_golden_header():
    code, out, _ = run_cli(["walsh", "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["covariance_adjacent_cells", "covariance_adjacent_cells_alt",
                       "density_transport_rhs", "tv_exact", "wsharp_exact",
                       "tv_bound", "wsharp_bound"]
    assert rows[1][0] == "-0.25"
    assert len(rows) == 2


def test_walsh_deterministic_output():
    _, first, _ = run_cli(["walsh"])
    _, second, _ = run_cli(["walsh"])
    assert strip_timestamp(first) == strip_timestamp(second)


def test_common_flags_accepted_before_and_after_subcommand():
    code_a, out_a, _ = run_cli(["--seed", "5", "walsh"])
    code_b, out_b, _ = run_cli(["walsh", "--seed", "5"])
    assert code_a == code_b == 0
    assert strip_timestamp(out_a) == strip_timestamp(out_b)


def test_cli_flag_overrides_config_seed(tmp_path):
    cfg = write_config(tmp_path, "seed=3\n")
    _, out, _ = run_cli(["walsh", "--config", cfg])
    assert parse_json(out)["seed"] == 3
    _, out, _ = run_cli(["walsh", "--config", cfg, "--seed", "9"])
    assert parse_json(out)["seed"] == 9


def test_out_writes_file_and_silences_stdout(tmp_path):
    target = tmp_path / "walsh.json"
    code, out, _ = run_cli(["walsh", "--out", str(target)])
    assert code == 0
    assert out == ""
    assert parse_json(target.read_text())["command"] == "walsh"


def test_bounds_sweep_small(tmp_path):
    cfg = write_config(tmp_path, "bounds.count=3\nbounds.dim=5\nbounds.n=2\n")
    code, out, _ = run_cli(["bounds", "--config", cfg])
    assert code == 0
    rep = parse_json(out)["report"]
    assert rep["passed"] is True
    assert len(rep["instances"]) == 3
    assert rep["min_tv_slack"] >= -1e-9
    assert rep["min_wsharp_slack"] >= -1e-9


def test_bounds_csv_summary_row(tmp_path):
    cfg = write_config(tmp_path, "bounds.count=2\nbounds.dim=5\nbounds.n=2\n")
    code, out, _ = run_cli(["bounds", "--config", cfg, "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n_indices", "n_points", "mode", "tv_value", "wsharp_value",
                       "tv_bound", "wsharp_bound", "tv_slack", "wsharp_slack"]
    assert rows[-1][2] == "summary"
    assert len(rows) == 4


def test_bounds_empirical_mode_reports_cis(tmp_path):
    cfg = write_config(tmp_path, "bounds.count=2\nbounds.dim=5\nbounds.n=2\n"
                       "bounds.mode=empirical\nbounds.budget=500\n"
                       "bounds.bootstrap_resamples=100\n")
    code, out, _ = run_cli(["bounds", "--config", cfg])
    assert code == 0
    for inst in parse_json(out)["report"]["instances"]:
        assert inst["mode"] == "empirical"
        assert inst["tv_ci"] is not None
        assert inst["wsharp_ci"] is not None


def test_rdm_monotonicity_run(tmp_path):
    cfg = write_config(tmp_path, "rdm.seeds=2\nrdm.dim=4\nrdm.n=2\nw1.max_iter=200000\n")
    code, out, _ = run_cli(["rdm-monotonicity", "--config", cfg])
    assert code == 0
    rep = parse_json(out)["report"]
    assert rep["passed"] is True
    for row in rep["rows"]:
        assert row["monotone"] is True
        values = row["values"]
        assert values[0] <= values[1] + rep["verdict_tol"]


def test_rdm_monotonicity_csv_columns(tmp_path):
    cfg = write_config(tmp_path, "rdm.seeds=1\nrdm.dim=4\nrdm.n=2\nw1.max_iter=200000\n")
    code, out, _ = run_cli(["rdm-monotonicity", "--config", cfg, "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["seed", "value_1", "value_2", "monotone", "error"]


def test_example_gap_table(tmp_path):
    cfg = write_config(tmp_path, "gap.n_max=5\n")
    code, out, _ = run_cli(["example-gap", "--config", cfg])
    assert code == 0
    rows = parse_json(out)["report"]["rows"]
    assert [r["n"] for r in rows] == [1, 2, 3, 4, 5]
    first = rows[0]
    assert first["w1_upper_over_n"] == pytest.approx(first["trace_distance"], abs=1e-12)


def test_selftest_single_check(tmp_path):
    cfg = write_config(tmp_path, "selftest.only=walsh_exhibit\n")
    code, out, _ = run_cli(["selftest", "--config", cfg])
    assert code == 0
    assert out.startswith("PASS walsh_exhibit")
    assert "budget 1s" in out


def test_selftest_unknown_name(tmp_path):
    cfg = write_config(tmp_path, "selftest.only=nonsense\n")
    code, _, err = run_cli(["selftest", "--config", cfg])
    assert code == 2
    assert "unknown check" in err


def test_instance_seed_split_is_stable():
    cfg = RunConfig(seed=4)
    assert cfg.instance_seed("walsh", 0) == cfg.instance_seed("walsh", 0)
    assert cfg.instance_seed("walsh", 0) != cfg.instance_seed("walsh", 1)
    assert cfg.instance_seed("walsh", 0) != cfg.instance_seed("bounds", 0)
    other = RunConfig(seed=5)
    assert cfg.instance_seed("walsh", 0) != other.instance_seed("walsh", 0)
