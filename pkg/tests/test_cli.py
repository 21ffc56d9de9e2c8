import json
import subprocess
import sys

import pytest

from coneflow.cli import main


def lines(path):
    return path.read_text().splitlines()


def data_header(path):
    return next(line for line in lines(path) if not line.startswith("#"))


def test_run_dirac_csv(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["run", "--flow", "dirac", "--k", "1", "--init", "f=0,df=1",
                 "--t-end", "1.5", "--step", "1e-3", "--out", str(out)])
    assert code == 0
    assert data_header(out) == "t,f,df,constraint_residual"
    assert lines(out)[-1].startswith("# stop: ReachedTEnd")
    assert len([l for l in lines(out) if not l.startswith("#")]) == 1502


def test_run_asd_csv(tmp_path):
    out = tmp_path / "eh.csv"
    assert main(["run", "--flow", "asd", "--init", "a1=0,a2=1", "--t-end", "2", "--out", str(out)]) == 0
    assert data_header(out) == "t,a1,a2,asd_res1,asd_res2"


def test_run_ricci2_collapse_footer(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["run", "--flow", "ricci2", "--init", "alpha=4,beta=9", "--out", str(out)]) == 0
    footer = lines(out)[-1]
    assert footer.startswith("# stop: Collapse t_stop=0.885")
    assert "component=alpha" in footer


def test_run_continue_flags_rows(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["run", "--flow", "ricci2", "--init", "alpha=4,beta=9", "--t-end", "1.2",
                 "--continue-past-collapse", "--out", str(out)]) == 0
    assert data_header(out) == "t,alpha,beta,nonriemannian"
    assert lines(out)[-2].endswith(",1")


def test_run_json(tmp_path):
    out = tmp_path / "n.json"
    assert main(["run", "--flow", "nricci2", "--format", "json", "--t-end", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert list(doc) == ["flow", "init", "config", "columns", "rows", "stop"]
    assert doc["columns"] == ["t", "a1", "a2"]
    assert doc["stop"]["reason"] == "ReachedTEnd"


def test_run_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["run", "--flow", "asd", "--init", "a1=0,a2=1", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_run_domain_exit(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["run", "--flow", "flow9", "--init", "a1=0,a2=1", "--out", str(out)]) == 2
    assert lines(out)[-1].startswith("# stop: DomainExit")


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["run"],
    ["run", "--flow", "nope"],
    ["run", "--flow", "ricci2", "--init", "a1=1,a2=2"],
    ["run", "--flow", "ricci2", "--init", "alpha=1"],
    ["run", "--flow", "ricci2", "--init", "alpha=1,beta=x"],
    ["run", "--flow", "ricci2", "--init", "alpha=1,beta=-1"],
    ["run", "--flow", "asd", "--k", "1"],
    ["run", "--flow", "dirac", "--k", "2"],
    ["run", "--flow", "asd", "--step", "0"],
    ["run", "--flow", "asd", "--step", "abc"],
    ["run", "--flow", "asd", "--max-samples", "5"],
    ["run", "--flow", "asd", "--continue-past-collapse"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nflow = dirac\nk = 0\ninit = f=0,df=1   # trailing\nt_end = 0.5\nstep = 0.1\n")
    out = tmp_path / "o.csv"
    assert main(["run", "--config", str(cfg), "--t-end", "0.2", "--no-adaptive", "--out", str(out)]) == 0
    rows = [l for l in lines(out) if not l.startswith("#")][1:]
    assert rows[-1].startswith("0.20000000000000001,")
    assert lines(out)[0] == "# flow: dirac[K=0]"


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main(["run", "--config", str(bad)]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 1


@pytest.mark.parametrize("argv", [
    ["--flow", "dirac", "--k", "-1", "--oracle", "closed-form", "--tol", "1e-6"],
    ["--flow", "asd", "--init", "a1=0,a2=1", "--oracle", "eh-match,einstein"],
    ["--flow", "nricci2", "--init", "a1=2,a2=1", "--oracle", "volume"],
    ["--flow", "ricci2", "--init", "alpha=4,beta=9", "--oracle", "beta-ode,slopes"],
    ["--flow", "ricci2", "--init", "alpha=9,beta=4", "--oracle", "implicit7"],
    ["--flow", "dirac", "--k", "1", "--oracle", "prop1,einstein,closed-form"],
    ["--flow", "ricci", "--oracle", "closed-form"],
])
def test_verify_passes(argv, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", *argv, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] is True
    assert list(doc) == ["flow", "init", "config", "stop", "oracles", "pass", "wall_time"]


def test_verify_failure_matches_report(tmp_path):
    out = tmp_path / "r.json"
    # a tolerance below rounding cannot pass
    assert main(["verify", "--flow", "asd", "--oracle", "eh-match", "--tol", "1e-30", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["pass"] is False
    # the nut never reaches the real branch of the implicit solution
    assert main(["verify", "--flow", "ricci2", "--oracle", "implicit7", "--out", str(out)]) == 1
    entry = json.loads(out.read_text())["oracles"]["implicit7"]
    assert entry["passed"] is False and "branch-unavailable" in entry


@pytest.mark.parametrize("argv", [
    ["--flow", "asd", "--oracle", "volume"],
    ["--flow", "ricci2", "--init", "alpha=4,beta=9", "--oracle", "closed-form"],
    ["--flow", "asd", "--init", "a1=1,a2=1", "--oracle", "eh-match"],
    ["--flow", "asd", "--oracle", "nonsense"],
    ["--flow", "asd"],
])
def test_verify_inapplicable(argv):
    assert main(["verify", *argv]) == 1


def test_curvature_round(capsys):
    assert main(["curvature", "--a1", "1", "--a2", "1"]) == 0
    assert "restricted Ricci: (4, 4, 4)" in capsys.readouterr().out


def test_curvature_json_eh(capsys):
    assert main(["curvature", "--profile", "eh", "--a", "1", "--r", "1.5", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["asd_residual"]["rho1"]) < 1e-12
    assert abs(doc["asd_residual"]["rho2"]) < 1e-12
    assert max(abs(v) for v in doc["ricci_ambient"].values()) < 1e-12


def test_curvature_errors(capsys):
    assert main(["curvature", "--a1", "0", "--a2", "1"]) == 2
    assert "a1" in capsys.readouterr().err
    assert main(["curvature", "--a1", "1"]) == 1
    assert main(["curvature", "--profile", "eh", "--a", "1"]) == 1


def sweep_rows(path):
    rows = [l.split(",") for l in lines(path) if not l.startswith("#")]
    header, body = rows[0], rows[1:]
    return [dict(zip(header, r)) for r in body]


def test_sweep_classes(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--flow", "ricci2", "--grid", "alpha=0:8:9,beta=1:8:8", "--out", str(out)]) == 0
    rows = sweep_rows(out)
    assert len(rows) == 72
    for r in rows:
        alpha, beta = float(r["alpha"]), float(r["beta"])
        if alpha == 0:
            assert r["class"] == "bolt-collapse"
        elif alpha == beta:
            assert r["class"] == "nut-collapse"
        elif alpha < beta:
            assert r["class"] == "merge-then-collapse"
            assert abs(float(r["final_ratio"]) - 1) < 0.01


def test_sweep_parallel_order(tmp_path):
    serial, parallel = tmp_path / "a.csv", tmp_path / "b.csv"
    grid = ["--flow", "ricci2", "--grid", "alpha=1:8:8,beta=1:8:8"]
    assert main(["sweep", *grid, "--out", str(serial)]) == 0
    assert main(["sweep", *grid, "--jobs", "4", "--out", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_sweep_too_large():
    assert main(["sweep", "--flow", "ricci2", "--grid", "alpha=1:8:100,beta=1:8:100"]) == 1
    assert main(["sweep", "--flow", "asd", "--grid", "a1=0:1:2,a2=1:2:2"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "coneflow", "curvature", "--a1", "1", "--a2", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "restricted Ricci: (0.25, 1.75, 1.75)" in proc.stdout
