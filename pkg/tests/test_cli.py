import json

import numpy as np
import pytest

from dptm.cli import main, parse_entries, parse_known, parse_shots, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parsers():
    assert parse_entries("1,1; 3,0") == [(1, 1), (3, 0)]
    assert parse_entries("full") == "full"
    assert parse_known("1,0=0;2,0=0.5") == {(1, 0): 0.0, (2, 0): 0.5}
    assert parse_shots("exact") is None and parse_shots("512") == 512
    for bad in (lambda: parse_entries("1"), lambda: parse_known("1,0"), lambda: parse_shots("1")):
        with pytest.raises(UsageError):
            bad()


def test_exact_amplitude_damping(capsys):
    code, out, _ = run(capsys, "exact", "--channel", "model=amplitude_damping,p=0.25", "--validate", "--choi")
    assert code == 0
    obj = json.loads(out)
    g = np.array(obj["gamma"])
    assert g[1, 1] == pytest.approx(np.sqrt(0.75), abs=1e-12)
    assert g[3, 0] == pytest.approx(0.25)
    assert obj["validity"]["min_choi_eigenvalue"] >= -1e-9
    assert len(obj["choi"]) == 4


def test_tomo_amplitude_damping_counts(capsys):
    code, out, _ = run(
        capsys, "tomo", "--channel", "model=amplitude_damping,p=0.25", "--entries", "1,1;2,2;3,0;3,3",
        "--known", "1,0=0;2,0=0", "--shots", "512", "--protocol", "dptm",
    )
    assert code == 0
    assert json.loads(out)["configuration_count"] == 4
    code, out, _ = run(
        capsys, "tomo", "--channel", "model=amplitude_damping,p=0.25", "--entries", "1,1;2,2;3,0;3,3",
        "--shots", "512", "--protocol", "sqpt",
    )
    assert json.loads(out)["configuration_count"] == 8


def test_tomo_both_exact_matches_analytic(capsys):
    code, out, _ = run(capsys, "tomo", "--channel", "model=random,n=2,num_kraus=3,seed=4")
    assert code == 0
    obj = json.loads(out)
    for row in obj["comparison"]["entries"]:
        assert abs(row["dptm"]["deviation"]) < 1e-10
        assert abs(row["sqpt"]["deviation"]) < 1e-10
    assert obj["comparison"]["configuration_counts"] == {"dptm": 240, "sqpt": 240}


def test_tomo_corr_depol_unital_two_configs(capsys):
    code, out, _ = run(
        capsys, "tomo", "--channel", "model=correlated_depolarizing,p=0.25,mu=0.75",
        "--entries", "4,4;6,6", "--prior", "unital", "--protocol", "dptm", "--shots", "2048",
    )
    assert json.loads(out)["configuration_count"] == 2


def test_tomo_csv_and_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(
        capsys, "tomo", "--channel", "model=amplitude_damping,p=0.25", "--entries", "3,0;3,3",
        "--format", "csv", "--out", str(target),
    )
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "protocol,i,j,gamma_hat,std_error,n_configs_used"
    assert len(lines) == 5


def test_tomo_seed_reproducible_and_env(capsys, monkeypatch):
    args = ["tomo", "--channel", "model=amplitude_damping,p=0.25", "--shots", "100", "--protocol", "dptm"]
    _, a, _ = run(capsys, *args, "--seed", "7")
    _, b, _ = run(capsys, *args, "--seed", "7", "--workers", "3")
    assert a == b
    monkeypatch.setenv("DPTM_SEED", "7")
    _, c, _ = run(capsys, *args)
    assert c == a
    monkeypatch.setenv("DPTM_SEED", "x")
    code, _, err = run(capsys, *args)
    assert code == 2 and "DPTM_SEED" in err


def test_cost_commands(capsys):
    code, out, _ = run(capsys, "cost", "--n", "3", "--protocol", "sqpt")
    block = json.loads(out)["protocols"]["sqpt"]
    assert (block["entry_cost_min"], block["entry_cost_max"]) == (8, 27)
    _, out, _ = run(capsys, "cost", "--n", "1", "--table")
    table = {r["prior"]: r["configurations"] for r in json.loads(out)["table"]}
    assert table == {"none": 16, "cptp": 12, "unital": 9, "pauli": 3}
    _, out, _ = run(capsys, "cost", "--n", "2", "--entry", "6,6")
    obj = json.loads(out)["protocols"]
    assert obj["dptm"]["entry"]["cost"] == 2 and obj["sqpt"]["entry"]["cost"] == 9
    _, out, _ = run(capsys, "cost", "--scaling", "--format", "csv")
    lines = out.splitlines()
    assert len(lines) == 9
    assert lines[-1].split(",")[:2] == ["8", "256"]


def test_repro_exit_codes(capsys):
    code, out, _ = run(capsys, "repro", "amp-damp")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "repro", "corr-depol", "--format", "csv")
    assert code == 0 and out.startswith("protocol,i,j,analytic")


@pytest.mark.parametrize(
    "argv",
    [
        ["exact", "--channel", "model=teleporter"],
        ["exact", "--channel", "model=amplitude_damping,p=2"],
        ["tomo", "--channel", "model=amplitude_damping,p=0.1", "--entries", "9,9"],
        ["tomo", "--channel", "model=amplitude_damping,p=0.1", "--shots", "one"],
        ["cost"],
        ["cost", "--n", "0"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["tomo", "--channel", "x", "--prior", "magic"])
    assert exc.value.code == 2
