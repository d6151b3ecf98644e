"""Command-line interface: artifacts, headers, exit codes, determinism."""
import math

import pytest

from conetrace import __version__
from conetrace.cli import main


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def read(tmp_path, name):
    return (tmp_path / name).read_text()


def test_validate_builtin(capsys, tmp_path):
    assert run(tmp_path, "validate", "--builtin", "octagon6pi") == 0
    out = capsys.readouterr().out
    assert "euler_characteristic -2" in out
    assert "genus 2" in out
    assert "ok" in out.splitlines()[-1]


def test_validate_invalid_surface(capsys, tmp_path):
    surf = tmp_path / "torus.surf"
    surf.write_text(
        "surface torus\nface 0 4 0 0 1 0 1 1 0 1\nglue 0.0 0.2\nglue 0.1 0.3\n"
    )
    assert run(tmp_path, "validate", str(surf)) == 1
    out = capsys.readouterr().out
    assert "violation NO_CONE_POINT" in out


def test_missing_surface_file(capsys, tmp_path):
    assert run(tmp_path, "validate", str(tmp_path / "missing.surf")) == 2
    assert "usage error" in capsys.readouterr().err


def test_no_surface_given(capsys, tmp_path):
    assert run(tmp_path, "validate") == 2


def test_trace_artifact(tmp_path):
    assert run(tmp_path, "trace", "--builtin", "octagon6pi",
               "--start", "0,0", "--len", "2.5") == 0
    text = read(tmp_path, "trace.csv")
    head = text.splitlines()[0]
    assert head.startswith(f"# conetrace {__version__} argv=")
    assert "seed=0" in head
    assert "edge_cross,0.9238795325112" in text  # crossing at the apothem
    assert "# length 2.5" in text


def test_artifacts_byte_identical(tmp_path):
    argv = ["trace", "--builtin", "octagon6pi", "--start", "0,0", "--len", "2.5"]
    assert run(tmp_path, *argv) == 0
    first = (tmp_path / "trace.csv").read_bytes()
    assert run(tmp_path, *argv) == 0
    assert (tmp_path / "trace.csv").read_bytes() == first


def test_develop_artifact(tmp_path):
    assert run(tmp_path, "develop", "--builtin", "octagon6pi",
               "--start", "0,0", "--len", "2.5") == 0
    text = read(tmp_path, "develop.csv")
    assert "# chord 2.5" in text


def test_gb_audit_tolerance(tmp_path):
    pi2 = math.pi / 2
    args = ["gb-audit", "--builtin", "octagon6pi", "--interior", f"{3 * math.pi}",
            "--boundary", ",".join([str(pi2)] * 4)]
    assert run(tmp_path, *args) == 0  # no tolerance: report only
    assert run(tmp_path, *args, "--tol", "1e-6") == 1  # residual is pi


def test_shorten_artifact(tmp_path):
    assert run(tmp_path, "shorten", "--builtin", "octagon6pi", "--word", "0+") == 0
    text = read(tmp_path, "shorten.txt")
    assert f"period {2 * math.cos(math.pi / 8):.17g}" in text
    assert "unique_in_class False" in text


def test_cylinder_artifact(tmp_path):
    assert run(tmp_path, "cylinder", "--builtin", "octagon6pi", "--word", "0+") == 0
    text = read(tmp_path, "cylinder.txt")
    assert "width_left 0.3826834323650894" in text  # sin(pi/8)


def test_unique_search_artifact(tmp_path):
    assert run(tmp_path, "unique-search", "--builtin", "octagon6pi", "--budget", "200") == 0
    text = read(tmp_path, "unique.txt")
    assert "unique_in_class True" in text
    assert "period 3.261972627395668" in text


def test_busemann_artifact(tmp_path):
    assert run(tmp_path, "busemann", "--builtin", "octagon6pi",
               "--ray-start", "0,0", "--horizon", "130",
               "--x", "0,0,0", "--x-prime", "0,0,0.15") == 0
    text = read(tmp_path, "busemann.csv")
    assert text.splitlines()[1] == "t,alpha"
    assert "converged True" in text


def test_converge_artifact(tmp_path):
    assert run(tmp_path, "converge", "--builtin", "octagon6pi",
               "--start1", "0,-0.025", "--start2", "0,0.025",
               "--horizon", "20", "--samples", "9") == 0
    text = read(tmp_path, "converge.csv")
    lines = text.splitlines()
    assert lines[1] == "t,distance"
    assert "# shift 0" in text
    vals = [float(l.split(",")[1]) for l in lines[2:2 + 9]]
    for v in vals:
        assert v == pytest.approx(0.05, abs=1e-9)


def test_mix_artifact(tmp_path):
    assert run(tmp_path, "mix", "--builtin", "octagon6pi",
               "--cell-o", "0,4,8,10", "--cell-u", "0,11,8,10",
               "--horizon", "50", "--dt", "2", "--samples", "20") == 0
    text = read(tmp_path, "mix.csv")
    lines = text.splitlines()
    assert lines[1] == "bin_index,t_lo,t_hi,hit"
    assert len([l for l in lines if l and not l.startswith("#")]) == 1 + 25
    assert "# first_hit" in text


def test_transit_artifact(tmp_path):
    assert run(tmp_path, "transit", "--builtin", "octagon6pi",
               "--cell-o", "0,4,8,10", "--cell-u", "0,11,8,10",
               "--horizon", "200", "--dt", "2", "--samples", "40", "--seed", "1") == 0
    text = read(tmp_path, "transit.csv")
    assert "# success True" in text


def test_cone_approach_artifact(tmp_path):
    assert run(tmp_path, "cone-approach", "--builtin", "octagon6pi",
               "--trajectories", "10", "--length", "30", "--seed", "4") == 0
    text = read(tmp_path, "cone_approach.csv")
    assert text.splitlines()[1] == "trajectory,final_min_distance"
    assert "# q50 " in text


def test_serialize_round_trip(capsys, tmp_path):
    out = tmp_path / "oct.surf"
    assert run(tmp_path, "serialize", "--builtin", "octagon6pi",
               "--out-file", str(out)) == 0
    assert run(tmp_path, "validate", str(out)) == 0


def test_bad_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("CONETRACE_THREADS", "zero")
    assert main(["validate", "--builtin", "octagon6pi"]) == 2
    monkeypatch.setenv("CONETRACE_THREADS", "0")
    assert main(["validate", "--builtin", "octagon6pi"]) == 2
    monkeypatch.setenv("CONETRACE_THREADS", "2")
    assert main(["validate", "--builtin", "octagon6pi"]) == 0
