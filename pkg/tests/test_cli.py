import json

import pytest
import yaml
from click.testing import CliRunner

from hamlow import __version__, config
from hamlow.main import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def instance(runner, tmp_path):
    path = tmp_path / "h.json"
    result = runner.invoke(
        cli, ["gen", "--n", "6", "--k", "3", "--m", "8", "--seed", "5", "--out", str(path)]
    )
    assert result.exit_code == 0, result.output
    return str(path)


def read_report(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_unknown_option_is_usage_error(runner):
    result = runner.invoke(cli, ["table", "--bogus"])
    assert result.exit_code == 1


def test_gen_is_deterministic(runner, tmp_path, instance):
    again = tmp_path / "again.json"
    runner.invoke(cli, ["gen", "--n", "6", "--k", "3", "--m", "8", "--seed", "5", "--out", str(again)])
    assert read_report(instance) == read_report(again)
    assert read_report(instance)["n"] == 6


def test_gen_rejects_k_above_n(runner):
    result = runner.invoke(cli, ["gen", "--n", "2", "--k", "3", "--m", "4"])
    assert result.exit_code == 1


def test_gen_requires_sizes(runner):
    result = runner.invoke(cli, ["gen", "--n", "4"])
    assert result.exit_code == 1


def test_certify_with_validation(runner, tmp_path, instance):
    out = tmp_path / "cert.json"
    result = runner.invoke(cli, ["certify", instance, "--mu", "0.3", "--validate", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = read_report(out)
    assert report["command"] == "certify"
    assert report["version"] == __version__
    (cert,) = report["results"]["certificates"]
    assert cert["validated"]["pass"] is True
    assert cert["validated"]["exact_count"] >= cert["lower_bound_D"]


def test_certify_several_mu(runner, tmp_path, instance):
    out = tmp_path / "cert.json"
    args = ["certify", instance, "--window-check", "--out", str(out)]
    for mu in ("0.1", "0.2", "0.3", "0.4", "0.5"):
        args += ["--mu", mu]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    results = read_report(out)["results"]
    assert [cert["mu"] for cert in results["certificates"]] == [0.1, 0.2, 0.3, 0.4, 0.5]
    assert all(check["pass"] for check in results["window_checks"])


def test_certify_rejects_zero_mu(runner, instance):
    result = runner.invoke(cli, ["certify", instance, "--mu", "0"])
    assert result.exit_code == 1


def test_certify_requires_mu(runner, instance):
    result = runner.invoke(cli, ["certify", instance])
    assert result.exit_code == 1


def test_certify_reads_run_config(runner, tmp_path, instance):
    run_config = tmp_path / "run.yaml"
    run_config.write_text(yaml.safe_dump({"mu": [0.3], "grid": {"eta_points": 5}}))
    out = tmp_path / "cert.json"
    result = runner.invoke(cli, ["certify", instance, "--config", str(run_config), "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = read_report(out)
    assert report["config"]["grid"]["eta_points"] == 5
    assert len(report["results"]["certificates"]) == 1


def test_optimize_depth(runner, tmp_path, instance):
    out = tmp_path / "bound.json"
    result = runner.invoke(
        cli,
        [
            "optimize-depth", instance, "--d", "1", "--restarts", "2", "--sweeps", "3",
            "--validate", "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    results = read_report(out)["results"]
    assert results["lambda0"] - 1e-9 <= results["energy_upper"] <= results["E_0"] + 1e-9
    assert len(results["circuit"]["layers"]) == 1


def test_optimize_depth_from_initial_circuit(runner, tmp_path, instance):
    first = tmp_path / "d1.json"
    runner.invoke(cli, ["optimize-depth", instance, "--d", "1", "--restarts", "1", "--sweeps", "2", "--out", str(first)])
    seed_circuit = tmp_path / "circuit.json"
    seed_circuit.write_text(json.dumps(read_report(first)["results"]["circuit"]))
    out = tmp_path / "d2.json"
    result = runner.invoke(
        cli,
        [
            "optimize-depth", instance, "--d", "2", "--restarts", "1", "--sweeps", "2",
            "--initial", str(seed_circuit), "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    shallow = read_report(first)["results"]["energy_upper"]
    assert read_report(out)["results"]["energy_upper"] <= shallow + 1e-9


def test_table_default_csv(runner, tmp_path):
    out = tmp_path / "table.csv"
    result = runner.invoke(cli, ["table", "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "k,epsilon,d,c_buhrman,c_buhrman_est,c_ours"
    assert len(lines) == 25


def test_table_pivot_and_json(runner, tmp_path):
    pivot = runner.invoke(cli, ["table", "--pivot"])
    assert pivot.exit_code == 0
    assert len(pivot.output.splitlines()) == 13
    as_json = runner.invoke(cli, ["table", "--format", "json", "--k", "3", "--d", "1"])
    rows = json.loads(as_json.output)
    assert len(rows) == 4
    assert rows[0]["c_ours"] == pytest.approx(0.4882501, abs=1e-7)


def test_table_plot_data(runner, tmp_path):
    plot = tmp_path / "plot.csv"
    result = runner.invoke(cli, ["table", "--k", "3", "--d", "0", "--plot-data", str(plot)])
    assert result.exit_code == 0
    assert plot.read_text().splitlines()[0] == "k,d,epsilon,c_ours,c_buhrman"


def test_simulate_exact(runner, tmp_path, instance):
    out = tmp_path / "sim.json"
    result = runner.invoke(
        cli, ["simulate", instance, "--epsilon", "0.2", "--samples", "200", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    results = read_report(out)["results"]
    outcome = results["outcome"]
    assert outcome["mode"] == "exact"
    assert results["lambda0"] - 1e-9 <= outcome["energy"] <= outcome["x"] + 1e-9
    assert all(row["error"] <= 1e-12 for row in results["overlap_crosscheck"])


def test_simulate_rejects_negative_epsilon(runner, instance):
    result = runner.invoke(cli, ["simulate", instance, "--epsilon=-0.1"])
    assert result.exit_code == 1


def test_oracle_cap_flag(runner, instance):
    result = runner.invoke(cli, ["simulate", instance, "--epsilon", "0.1", "--oracle-cap", "3"])
    assert result.exit_code == 3


def test_oracle_cap_env(runner, instance, monkeypatch):
    monkeypatch.setenv(config.ORACLE_CAP_ENV, "3")
    result = runner.invoke(cli, ["simulate", instance, "--epsilon", "0.1"])
    assert result.exit_code == 3


def test_sweep_writes_header_and_records(runner, tmp_path):
    out = tmp_path / "sweep.jsonl"
    result = runner.invoke(
        cli,
        [
            "sweep", "--n", "4", "--k", "2", "--m-factor", "1", "--instances", "2",
            "--mu", "0.3", "--workers", "2", "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    header, *records = [json.loads(line) for line in out.read_text().splitlines()]
    assert header["command"] == "sweep"
    assert "generated_at" not in header
    assert sorted(record["id"] for record in records) == [0, 1]
    assert all(record["pass"] for record in records)
    assert set(records[0]["checks"]) == {"certify", "window", "overlap"}


def test_setup_then_status(runner, isolated_config):
    result = runner.invoke(cli, ["setup"], input="10\n20\n2\n7\n")
    assert result.exit_code == 0, result.output
    assert config.get_value("oracle_cap") == 10
    assert config.get_oracle_cap() == 10
    assert config.get_seed() == 7
    status = runner.invoke(cli, ["status"])
    assert status.exit_code == 0
    assert "oracle_cap" in status.output
    assert "config file" in status.output


def test_simulate_poly_reports_fidelity(runner, tmp_path, instance):
    out = tmp_path / "sim.json"
    result = runner.invoke(
        cli,
        [
            "simulate", instance, "--epsilon", "0.2", "--mode", "poly", "--degree", "256",
            "--samples", "200", "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    outcome = read_report(out)["results"]["outcome"]
    assert outcome["mode"] == "poly"
    assert outcome["degree"] == 256
    assert 0.0 <= outcome["fidelity_to_exact"] <= 1.0 + 1e-12


def test_failed_validation_exits_2_after_writing(runner, tmp_path, instance, monkeypatch):
    from hamlow.density import Validation, certify_density

    def contradicted(*args, **kwargs):
        cert = certify_density(*args, **kwargs)
        cert.validated = Validation(exact_count=0, passed=False)
        return cert

    monkeypatch.setattr("hamlow.commands.certify.certify_density", contradicted)
    out = tmp_path / "cert.json"
    result = runner.invoke(cli, ["certify", instance, "--mu", "0.3", "--validate", "--out", str(out)])
    assert result.exit_code == 2
    (cert,) = read_report(out)["results"]["certificates"]
    assert cert["validated"]["pass"] is False


def test_sweep_records_failed_instance(runner, tmp_path, monkeypatch):
    from hamlow.commands import sweep as sweep_module

    real = sweep_module.run_instance

    def flaky(spec, *args):
        if spec["id"] == 1:
            raise RuntimeError("boom")
        return real(spec, *args)

    monkeypatch.setattr(sweep_module, "run_instance", flaky)
    out = tmp_path / "sweep.jsonl"
    result = runner.invoke(
        cli,
        [
            "sweep", "--n", "4", "--k", "2", "--m-factor", "1", "--instances", "3",
            "--mu", "0.3", "--workers", "2", "--out", str(out),
        ],
    )
    assert result.exit_code == 2
    _, *records = [json.loads(line) for line in out.read_text().splitlines()]
    by_id = {record["id"]: record for record in records}
    assert sorted(by_id) == [0, 1, 2]
    assert by_id[1] == {"id": 1, "error": "RuntimeError: boom", "pass": False}
    assert by_id[0]["pass"] and by_id[2]["pass"]
