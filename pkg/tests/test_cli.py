"""Command line front end: subcommands, exit codes, reproducibility."""

import json
import subprocess
import sys

import pytest

from algebroids import Connection, Metric, dump_document, make_example
from algebroids.documents import AlgebroidDocument

from conftest import scal


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "algebroids.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture
def halfplane_doc(tmp_path):
    A = make_example("tangent_lie", n=2).algebroid
    names = A.coords
    metric = Metric(
        [[scal("1/x2^2", names), A.zero()], [A.zero(), scal("1/x2^2", names)]]
    )
    conn = Connection.of(
        2,
        {
            (0, 0, 1): scal("-1/x2", names),
            (0, 1, 0): scal("-1/x2", names),
            (1, 0, 0): scal("1/x2", names),
            (1, 1, 1): scal("-1/x2", names),
        },
    )
    path = tmp_path / "halfplane.json"
    dump_document(AlgebroidDocument(A, metric, conn), str(path))
    return str(path)


@pytest.fixture
def infeasible_doc(tmp_path):
    A0 = make_example("tangent_lie", n=2).algebroid
    names = A0.coords
    from algebroids import AlgebroidData

    A = AlgebroidData(
        dim=2, rank=2, coords=A0.coords, anchor=A0.anchor,
        gamma={(0, 0, 1): A0.one(), (0, 1, 0): A0.one()},
        loc={}, proj=A0.proj,
    )
    path = tmp_path / "dull.json"
    dump_document(AlgebroidDocument(A), str(path))
    return str(path)


def test_check_full_suite_passes(halfplane_doc):
    out = run_cli("check", halfplane_doc, "--suite", "all")
    assert out.returncode == 0, out.stdout + out.stderr
    lines = [json.loads(line) for line in out.stdout.splitlines()]
    names = {obj["identity"] for obj in lines}
    assert "classify" in names
    assert "cartan-structure" in names
    assert "levicivita-solution" in names
    assert all(obj.get("pass") is not False for obj in lines)


def test_check_solve_torsion_free_infeasible_exit_3(infeasible_doc):
    out = run_cli("check", infeasible_doc, "--solve", "torsion-free")
    assert out.returncode == 3
    first = json.loads(out.stdout.splitlines()[0])
    assert first["status"] == "infeasible"
    assert "witness" in first


def test_check_malformed_expression_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps(
            {
                "dimension": 1,
                "rank": 1,
                "coordinates": ["x1"],
                "anchor": [["x1^"]],
            }
        )
    )
    out = run_cli("check", str(path))
    assert out.returncode == 2
    assert "error" in out.stderr


def test_check_identity_failure_exit_1(tmp_path, courant2):
    # a connection violating admissibility makes the gated identities fail
    doc = AlgebroidDocument(
        algebroid=courant2.algebroid,
        metric=courant2.metric,
        connection=Connection.of(4, {(0, 0, 0): courant2.algebroid.one()}),
    )
    path = tmp_path / "bad_conn.json"
    dump_document(doc, str(path))
    out = run_cli("check", str(path), "--suite", "cartan")
    assert out.returncode == 1
    lines = [json.loads(line) for line in out.stdout.splitlines()]
    assert any(obj.get("pass") is False for obj in lines)


def test_compute_levicivita(halfplane_doc):
    out = run_cli("compute", halfplane_doc, "levicivita")
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["status"] == "unique"
    got = {tuple(e["idx"]): e["val"] for e in obj["particular"]}
    assert got[(1, 1, 2)] == "(-1)/(x2)"
    assert got[(1, 2, 1)] == "(-1)/(x2)"
    assert got[(2, 1, 1)] == "(1)/(x2)"
    assert got[(2, 2, 2)] == "(-1)/(x2)"
    assert obj["denominator_loci"] == ["x2"]


def test_compute_torsion_zero_connection(tmp_path, courant1):
    doc = AlgebroidDocument(
        algebroid=courant1.algebroid,
        metric=courant1.metric,
        connection=Connection.zero(2),
    )
    path = tmp_path / "courant.json"
    dump_document(doc, str(path))
    out = run_cli("compute", str(path), "torsion")
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["components"] == []


def test_compute_curvature_requires_projector(tmp_path):
    A0 = make_example("tangent_lie", n=1).algebroid
    from algebroids import AlgebroidData

    A = AlgebroidData(
        dim=1, rank=1, coords=A0.coords, anchor=A0.anchor,
        gamma={}, loc={}, proj=None,
    )
    doc = AlgebroidDocument(algebroid=A, connection=Connection.zero(1))
    path = "/tmp/no_proj.json"
    dump_document(doc, path)
    out = run_cli("compute", path, "curvature")
    assert out.returncode == 2
    assert "projector" in out.stderr


def test_example_emits_valid_document(tmp_path):
    out = run_cli("example", "courant_standard", "--n", "1")
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["rank"] == 2
    assert len(obj["L"]) == 4
    # document loads back
    from algebroids.documents import document_from_obj

    doc = document_from_obj(obj)
    assert doc.metric is not None


def test_example_remaining_families(tmp_path):
    out = run_cli(
        "example", "twisted_frame_lie", "--n", "2",
        "--matrix", json.dumps([["1", "0"], ["0", "x1"]]),
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["gamma"]

    out = run_cli(
        "example", "courant_h_twisted", "--n", "3",
        "--h", json.dumps([{"idx": [1, 2, 3], "val": "5"}]),
    )
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["rank"] == 6 and obj["gamma"]

    params = json.dumps(
        {
            "rank": 2,
            "metric": [
                {"idx": [1, 1], "val": "1 + x1^2"},
                {"idx": [2, 2], "val": "1"},
            ],
            "theta": ["x1", "0"],
        }
    )
    out = run_cli("example", "metric_algebroid", "--n", "2", "--params", params)
    assert out.returncode == 0
    assert json.loads(out.stdout)["gamma"]
    out = run_cli("example", "conformal_courant", "--n", "2", "--params", params)
    assert out.returncode == 0
    assert json.loads(out.stdout)["theta"] == ["x1", "0"]


def test_example_higher_courant_carries_pairing():
    out = run_cli("example", "higher_courant", "--n", "3", "--p", "2")
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["rank"] == 6
    assert obj["higher_metric"]["p"] == 2
    assert obj["higher_metric"]["entries"]


def test_frame_change_round_trip(tmp_path, halfplane_doc):
    matrix = json.dumps([["1", "0"], ["0", "x1"]])
    out = run_cli("frame-change", halfplane_doc, "--matrix", matrix)
    assert out.returncode == 0
    obj = json.loads(out.stdout)
    assert obj["gamma"]  # twisted frame has structure functions
    inverse = json.dumps([["1", "0"], ["0", "1/x1"]])
    path2 = tmp_path / "twisted.json"
    path2.write_text(out.stdout)
    back = run_cli("frame-change", str(path2), "--matrix", inverse)
    assert back.returncode == 0
    obj2 = json.loads(back.stdout)
    assert obj2["gamma"] == []


def test_reproducible_byte_identical_reports(halfplane_doc, tmp_path):
    out1 = tmp_path / "r1.jsonl"
    out2 = tmp_path / "r2.jsonl"
    a = run_cli("check", halfplane_doc, "--seed", "7", "-o", str(out1))
    b = run_cli("check", halfplane_doc, "--seed", "7", "-o", str(out2))
    assert a.returncode == b.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes()


def test_table_format(halfplane_doc):
    out = run_cli("check", halfplane_doc, "--suite", "classify", "--format", "table")
    assert out.returncode == 0
    assert "classify" in out.stdout


def test_budget_exceeded_exit_4(tmp_path):
    # the metric inverse needs a 3-term scalar, crossing a budget of 2
    A = make_example("tangent_lie", n=2).algebroid
    names = A.coords
    metric = Metric([[scal("1 + x1^2", names), A.zero()], [A.zero(), A.one()]])
    path = tmp_path / "binomial.json"
    dump_document(AlgebroidDocument(A, metric, None), str(path))
    out = run_cli("compute", str(path), "levicivita", "--budget", "2")
    assert out.returncode == 4
    assert "budget" in out.stderr
