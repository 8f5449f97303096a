import csv
import io
import subprocess
import sys

import pytest
import yaml

from cogrelay import cli
from cogrelay.cli import COLUMNS, main
from cogrelay.presets import PHYSICAL_DEFAULT, get_preset


def sweep(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main(["sweep", *args, "--out", str(out)])
    return code, out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_empty_range_is_header_only(tmp_path):
    code, out = sweep(tmp_path, "--preset", "fig2", "--axis", "lambda_p", "--from", "0.3", "--to", "0.1", "--step", "0.05")
    assert code == 0
    assert out.read_text() == ",".join(COLUMNS) + "\n"


def test_rows_in_sweep_order(tmp_path):
    code, out = sweep(tmp_path, "--preset", "fig2", "--axis", "lambda_p", "--from", "0", "--to", "0.35",
                      "--step", "0.05", "--grid", "11")
    assert code == 0
    r = rows(out)
    assert [x["system"] for x in r[:4]] == ["S1", "S2", "S3", "Sc"]
    assert [float(x["axis_value"]) for x in r[::4]] == pytest.approx([0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35])
    last = [x for x in r if x["axis_value"] == "0.35"]
    assert all(x["feasible"] == "false" and float(x["mu_s_star"]) == 0 for x in last)
    assert all(x["sim_mu_s"] == "" for x in r)


def test_byte_deterministic_and_projection(tmp_path):
    args = ["--preset", "fig5", "--axis", "lambda_p", "--from", "0", "--to", "0.2", "--step", "0.1", "--grid", "9",
            "--sim", "--replicas", "2", "--slots", "3000", "--seed", "3"]
    _, a = sweep(tmp_path, *args, name="a.csv")
    _, b = sweep(tmp_path, *args, "--workers", "2", name="b.csv")
    assert a.read_bytes() == b.read_bytes()
    _, c = sweep(tmp_path, *args[:-7], "--systems", "S3,SIM", "--replicas", "2", "--slots", "3000", "--seed", "3",
                 name="c.csv")
    full = [x for x in rows(a) if x["system"] in ("S3", "SIM")]
    assert rows(c) == full
    sim = [x for x in rows(a) if x["system"] == "SIM"]
    assert all(x["sim_mu_s"] != "" and x["mu_s_star"] == "" for x in sim)


def test_fig3_overlap_at_full_harvest(tmp_path):
    _, out = sweep(tmp_path, "--preset", "fig3", "--axis", "lambda_p", "--from", "0", "--to", "0.3", "--step", "0.1",
                   "--systems", "S2,S3", "--grid", "21")
    r = rows(out)
    for s2, s3 in zip(r[::2], r[1::2]):
        assert float(s2["mu_s_star"]) == pytest.approx(float(s3["mu_s_star"]), abs=0.02)


def test_mpr_saturation(tmp_path):
    _, out = sweep(tmp_path, "--preset", "fig5", "--axis", "X", "--from", "0", "--to", "1", "--step", "0.5",
                   "--lambda-p", "0.2", "--systems", "S3", "--grid", "11")
    vals = [float(x["mu_s_star"]) for x in rows(out)]
    assert vals == sorted(vals)
    # with X = 1 the users do not hurt each other: the SU reaches its solo rate
    assert vals[-1] == pytest.approx(0.7)


def test_lambda_e_and_b_axes(tmp_path):
    code, out = sweep(tmp_path, "--preset", "fig3", "--axis", "lambda_e", "--from", "0.4", "--to", "1", "--step", "0.3",
                      "--lambda-p", "0.1", "--systems", "S2", "--grid", "9")
    assert code == 0
    vals = [float(x["mu_s_star"]) for x in rows(out)]
    assert vals == sorted(vals)
    code, out = sweep(tmp_path, "--preset", "physical", "--axis", "B", "--from", "500", "--to", "2500", "--step", "1000",
                      "--systems", "S3", "--grid", "9", "--lambda-p", "0.1")
    assert code == 0 and len(rows(out)) == 3


def test_config_files(tmp_path):
    direct = tmp_path / "d.yaml"
    direct.write_text(yaml.safe_dump({
        "channel": {"direct": get_preset("fig2").direct},
        "arrivals": {"lambda_e": 0.9},
        "policy-grid": {"grid": 9},
    }))
    code, out = sweep(tmp_path, "--config", str(direct), "--axis", "lambda_p", "--from", "0.1", "--to", "0.1",
                      "--step", "0.1", "--systems", "S2")
    assert code == 0
    code2, out2 = sweep(tmp_path, "--preset", "fig2", "--axis", "lambda_p", "--from", "0.1", "--to", "0.1",
                        "--step", "0.1", "--systems", "S2", "--grid", "9", name="p.csv")
    assert out.read_text() == out2.read_text()

    phys = tmp_path / "p.yaml"
    phys.write_text(yaml.safe_dump({"channel": {"physical": PHYSICAL_DEFAULT}, "arrivals": {"lambda_e": 0.8}}))
    code, _ = sweep(tmp_path, "--config", str(phys), "--axis", "B", "--from", "1000", "--to", "1000", "--step", "1",
                    "--systems", "S3", "--grid", "5")
    assert code == 0


@pytest.mark.parametrize("doc,msg", [
    ({"channel": {"direct": {"pbar.sd_s.0": 1.3}}}, "pbar.sd_s.0"),
    ({"channel": {}}, "exactly one"),
    ({"arrivals": {"lambda_e": 0.5}}, "channel"),
    ({"channel": {"direct": get_preset("fig2").direct}, "arrivals": {"lambda_e": 2}}, "arrivals.lambda_e"),
    ({"channel": {"direct": get_preset("fig2").direct}, "policy-grid": {"grid": 1}}, "grid"),
    ({"channel": {"direct": get_preset("fig2").direct}, "extras": {}}, "unknown"),
    ({"channel": {"physical": {**PHYSICAL_DEFAULT, "bits": -1}}}, "bits"),
])
def test_config_errors_exit_2(tmp_path, capsys, doc, msg):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(doc))
    code, _ = sweep(tmp_path, "--config", str(path), "--axis", "lambda_p", "--from", "0", "--to", "0.1", "--step", "0.1")
    assert code == 2
    assert msg in capsys.readouterr().err


@pytest.mark.parametrize("extra", [
    ["--axis", "X", "--from", "0", "--to", "1", "--step", "0.5"],
    ["--axis", "B", "--from", "100", "--to", "200", "--step", "100"],
    ["--axis", "lambda_p", "--from", "0", "--to", "1.5", "--step", "0.5"],
    ["--axis", "lambda_p", "--from", "0", "--to", "0.5", "--step", "0"],
    ["--axis", "lambda_p", "--from", "0", "--to", "0.5", "--step", "0.1", "--systems", "S9"],
    ["--axis", "lambda_p", "--from", "0", "--to", "0.5", "--step", "0.1", "--lambda-e", "1.2"],
])
def test_cli_errors_exit_2(tmp_path, extra):
    code, _ = sweep(tmp_path, "--preset", "fig2", *extra)
    assert code == 2


def test_missing_config_file(tmp_path):
    code, _ = sweep(tmp_path, "--config", str(tmp_path / "nope.yaml"), "--axis", "lambda_p", "--from", "0",
                    "--to", "0", "--step", "1")
    assert code == 2


def test_invariant_violation_exit_3(tmp_path, monkeypatch):
    real = cli.optimize

    def broken(*a, **k):
        r = real(*a, **k)
        from dataclasses import replace
        return replace(r, best_rates=replace(r.best_rates, mu_s=1.5))

    monkeypatch.setattr(cli, "optimize", broken)
    code, _ = sweep(tmp_path, "--preset", "fig2", "--axis", "lambda_p", "--from", "0", "--to", "0", "--step", "1",
                    "--systems", "S3", "--grid", "5")
    assert code == 3


def test_presets_listing(capsys):
    assert main(["presets", "fig5"]) == 0
    text = capsys.readouterr().out
    assert "free sweep variables: X" in text
    assert main(["presets", "fig2"]) == 0
    assert "lambda_e = 0.9" in capsys.readouterr().out
    assert main(["presets", "fig9"]) == 2
    assert "fig2, fig3, fig5" in capsys.readouterr().err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "cogrelay.cli", "presets"], capture_output=True, text=True)
    assert out.returncode == 0 and "fig3" in out.stdout
