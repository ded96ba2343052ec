import csv
import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from haareig import DomainError, cli, stats
from haareig.experiments import Ensemble, parse_det, sample_eigs
from haareig.stats import Histogram


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def read_sample_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    assert rows[0] == ["trial_index", "re", "im"]
    return np.array([[float(x) for x in r] for r in rows[1:]])


# --- config -------------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(trials=0), dict(n=0), dict(command="hist", bins=1),
                                dict(field="real", det="phase:0.3"), dict(det="2"), dict(seed=-3)])
def test_run_config_rejects(kw):
    base = dict(command="sample")
    base.update(kw)
    with pytest.raises((DomainError, ValueError)):
        cli.RunConfig(**base)


def test_parse_det():
    assert parse_det("none") is None
    assert parse_det("+1") == 1 and parse_det("-1") == -1
    assert parse_det("phase:0.5") == pytest.approx(np.exp(0.5j))


def test_seed_env_override():
    ns = cli.build_parser().parse_args(["sample"])
    assert cli.config_from_args(ns, env={"HAAREIG_SEED": "17"}).seed == 17
    ns = cli.build_parser().parse_args(["sample", "--seed", "3"])
    assert cli.config_from_args(ns, env={"HAAREIG_SEED": "17"}).seed == 3


def test_bad_args_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["sample", "--trials", "0"])
    assert e.value.code == 2


# --- sample -------------------------------------------------------------

def test_sample_n1(capsys):
    code, out = run(["sample", "--n", "1", "--trials", "3"], capsys)
    data = read_sample_csv(out)
    assert code == 0 and data.shape == (3, 3)
    assert np.allclose(np.hypot(data[:, 1], data[:, 2]), 1)


def test_sample_det_constraint(capsys):
    code, out = run(["sample", "--n", "10", "--det", "+1", "--trials", "20", "--seed", "4"], capsys)
    data = read_sample_csv(out)
    for t in range(20):
        z = data[data[:, 0] == t, 1] + 1j * data[data[:, 0] == t, 2]
        assert len(z) == 10 and abs(np.prod(z) - 1) <= 1e-10


def test_sample_deterministic_and_file_output(tmp_path, capsys):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["sample", "--n", "6", "--trials", "300", "--seed", "9", "--out", str(p1)])
    cli.main(["sample", "--n", "6", "--trials", "300", "--seed", "9", "--out", str(p2)])
    assert p1.read_bytes() == p2.read_bytes()
    assert len(p1.read_text().splitlines()) == 1 + 300 * 6


def test_sample_dense_method(capsys):
    code, out = run(["sample", "--n", "8", "--trials", "5", "--method", "dense", "--field", "real"], capsys)
    data = read_sample_csv(out)
    assert code == 0 and data.shape == (40, 3)


def test_sample_convergence_failure_flags_file(monkeypatch, capsys):
    from haareig import unitary_qr
    monkeypatch.setattr(cli, "SolverOptions", lambda: unitary_qr.SolverOptions(0.0, 1))
    code, out = run(["sample", "--n", "40", "--trials", "2"], capsys)
    assert code != 0
    assert out.splitlines()[-1].startswith("# incomplete")


def test_factored_and_dense_agree_statistically():
    ens = Ensemble(8)
    a = sample_eigs(ens, 3000, 1)
    b = sample_eigs(ens, 3000, 2, method="dense")
    assert not np.allclose(a[:5], b[:5])
    from scipy import stats as sps
    assert sps.ks_2samp(stats.phases(a[:, 0]), stats.phases(b[:, 0])).pvalue > 0.001
    sa = np.concatenate([stats.spacings(r) for r in a])
    sb = np.concatenate([stats.spacings(r) for r in b])
    assert sps.ks_2samp(sa, sb).pvalue > 0.001


def test_workers_do_not_change_results():
    ens = Ensemble(5, "real", -1.0 + 0j)
    a = sample_eigs(ens, 600, 3, workers=1)
    b = sample_eigs(ens, 600, 3, workers=2)
    assert np.array_equal(a, b)


# --- hist ---------------------------------------------------------------

def test_hist_unitary(tmp_path, capsys):
    code, out = run(["hist", "--n", "10", "--trials", "10000", "--out", str(tmp_path)], capsys)
    assert code == 0
    dist = tmp_path / "eig-dist-unitary-10-0.dat"
    spac = tmp_path / "eig-spacing-unitary-10-0.dat"
    assert dist.exists() and spac.exists()
    edges, dens = Histogram.from_text(dist.read_text())
    assert len(dens) == 50 and edges[0] == 0 and edges[-1] == pytest.approx(2 * math.pi)
    assert abs((dens * np.diff(edges)).sum() - 1) <= 1e-12
    # binomial 4-sigma band around 1/2pi per bin
    p, n = 1 / 50, 1e5
    assert np.max(np.abs(dens * np.diff(edges) - p)) < 4 * math.sqrt(p * (1 - p) / n) + 1e-3
    edges, dens = Histogram.from_text(spac.read_text())
    assert len(dens) == 30 and edges[-1] == 3.0
    assert abs((dens * np.diff(edges)).sum() - 1) <= 1e-12


def test_hist_orthogonal_atom(tmp_path, capsys):
    run(["hist", "--n", "9", "--field", "real", "--det", "-1", "--trials", "2000", "--out", str(tmp_path)], capsys)
    edges, dens = Histogram.from_text((tmp_path / "eig-dist-orthog-09-m1.dat").read_text())
    masses = dens * np.diff(edges)
    k = np.searchsorted(edges, math.pi, side="right") - 1
    # every matrix has -1, so at least 1/9 of all phases sit in the bin containing pi
    assert masses[k] >= 1 / 9
    assert masses[k] > 3 * np.median(masses)


def test_hist_bins_and_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run(["hist", "--n", "4", "--trials", "500", "--bins", "20", "--seed", "2", "--out", str(d)], capsys)
    for name in ("eig-dist-unitary-04-0.dat", "eig-spacing-unitary-04-0.dat"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert len((a / "eig-dist-unitary-04-0.dat").read_text().splitlines()) == 21


def test_hist_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _ = run(["hist", "--n", "3", "--trials", "10", "--out", str(blocker / "sub")], capsys)
    assert code != 0


# --- validate -----------------------------------------------------------

def parse_report(out):
    rows = [ln.split("\t") for ln in out.splitlines() if ln and not ln.startswith("#")]
    return {r[0]: r for r in rows}


def test_validate_smoke_n2(capsys):
    t0 = time.perf_counter()
    code, out = run(["validate", "--n", "2", "--trials", "1000"], capsys)
    assert time.perf_counter() - t0 < 1.0
    assert code == 0
    assert all(r[3] == "PASS" for r in parse_report(out).values())


@pytest.mark.parametrize("args", [["--field", "real", "--det", "-1", "--n", "10"],
                                  ["--field", "real", "--det", "+1", "--n", "9"],
                                  ["--det", "phase:1.0", "--n", "8"],
                                  ["--det", "+1", "--n", "5"],
                                  ["--method", "dense", "--n", "6"]])
def test_validate_other_ensembles_pass(args, capsys):
    code, out = run(["validate", "--trials", "3000", *args], capsys)
    rep = parse_report(out)
    assert code == 0, out
    assert rep and all(r[3] == "PASS" for r in rep.values())


def test_validate_default_complex_n10(capsys):
    """Default suite; the spacing check compares against the surmise as specified."""
    code, out = run(["validate", "--n", "10", "--trials", "10000"], capsys)
    rep = parse_report(out)
    for name in ("spectral power sums (err/n)", "determinant (err/n)", "phase uniformity (KS)"):
        assert rep[name][3] == "PASS"
    spacing = rep["spacing vs surmise (TV)"]
    print(out)
    assert spacing[3] == "PASS", f"spacing TV {spacing[1]} >= {spacing[2]}"
    assert code == 0


def test_validate_detects_skip_chi_mutant(capsys):
    _, good = run(["validate", "--n", "10", "--trials", "10000"], capsys)
    code, bad = run(["validate", "--n", "10", "--trials", "10000", "--mutant", "skip-chi"], capsys)
    g, b = parse_report(good), parse_report(bad)
    assert code != 0
    assert b["spacing vs surmise (TV)"][3] == "FAIL"
    # the mutant is far from every repulsion law, well beyond the genuine sampler's distance
    assert float(b["spacing vs surmise (TV)"][1]) > 2 * float(g["spacing vs surmise (TV)"][1])
    assert float(b["spacing vs surmise (TV)"][5].split("= ")[1]) > 0.2


def test_validate_to_file(tmp_path, capsys):
    out = tmp_path / "rep.tsv"
    code, _ = run(["validate", "--n", "3", "--trials", "500", "--out", str(out)], capsys)
    assert code == 0 and "PASS" in out.read_text()


# --- bench --------------------------------------------------------------

def test_bench_small(capsys):
    code, out = run(["bench", "--sizes", "32,64,128"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n\tmethod\tseconds\tchases"
    rows = [ln.split("\t") for ln in lines[1:] if not ln.startswith("#")]
    assert {r[1] for r in rows} == {"factored", "dense"} and len(rows) == 6
    assert any(ln.startswith("# slope factored") for ln in lines)
    assert any(ln.startswith("# slope dense") for ln in lines)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "haareig", "sample", "--n", "2", "--trials", "1"],
                         capture_output=True, text=True, check=True)
    assert len(res.stdout.splitlines()) == 3
