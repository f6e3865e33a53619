"""CLI surface: reports, exit codes, determinism, JSON/text consistency."""

import json
import re

import pytest

from metricinv.cli import main

from conftest import PPWAVE, REVOLUTION, SPHERE2

pytestmark = pytest.mark.usefixtures("metric_files")


@pytest.fixture(scope="module")
def metric_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("metrics")
    files = {}
    for name, text in [
        ("sphere2", SPHERE2),
        ("revolution", REVOLUTION),
        ("ppwave", PPWAVE),
    ]:
        path = root / f"{name}.metric"
        path.write_text(text)
        files[name] = str(path)
    return files


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def test_count_command(capsys):
    doc = run_json(capsys, "count", "--dim", "3", "--max-k", "4")
    assert doc["results"]["s"] == [0, 0, 3, 18, 45]
    assert doc["results"]["delta"] == [0, 0, 3, 15, 27]


def test_count_rejects_dim_one(capsys):
    code, _, err = run_cli(capsys, "count", "--dim", "1")
    assert code == 2
    assert "input error" in err


def test_poincare_command(capsys):
    doc = run_json(capsys, "poincare", "--dim", "2", "--expand", "5")
    assert doc["results"]["series_delta"] == [0, 0, 1, 1, 3, 4]
    assert doc["results"]["pole_order_at_one"] == 2
    doc4 = run_json(capsys, "poincare", "--dim", "4", "--expand", "3")
    assert doc4["results"]["series_delta"][2] == 14


def test_curvature_command_sphere(capsys, metric_files):
    doc = run_json(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=1,y=0",
    )
    assert doc["results"]["scalar_curvature"] == pytest.approx(2.0, rel=1e-12)
    assert doc["results"]["weyl"] is None
    assert "metric_digest" in doc


def test_curvature_singular_point_exit_3(capsys, metric_files):
    code, _, err = run_cli(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=0,y=0",
    )
    assert code == 3
    assert "SingularMetric" in err


def test_curvature_bad_point_exit_2(capsys, metric_files):
    code, _, err = run_cli(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=1,q=0",
    )
    assert code == 2


def test_missing_metric_file_exit_2(capsys):
    code, _, _ = run_cli(capsys, "curvature", "--metric", "nope.metric",
                         "--point", "x=1,y=0")
    assert code == 2


def test_invariants_command_emits_partial_on_homogeneous(capsys, metric_files):
    doc = run_json(
        capsys, "invariants", "--metric", metric_files["sphere2"],
        "--point", "x=1.2,y=0.4", "--max-order", "3",
    )
    assert doc["results"]["labels"] == ["I1", "I2'"]
    assert doc["results"]["values"][0] == pytest.approx(2.0, rel=1e-12)
    assert any("SingularFrame" in w for w in doc["warnings"])


def test_homogeneity_command(capsys, metric_files):
    doc = run_json(
        capsys, "homogeneity", "--metric", metric_files["revolution"],
        "--box", "x=0:3,y=0:3", "--samples", "20", "--seed", "5",
    )
    assert doc["results"]["homogeneity"] == 1
    assert len(doc["results"]["samples"]) == 20
    assert doc["results"]["samples"][0]["singular_values"]


def test_homogeneity_ppwave_warning(capsys, metric_files):
    doc = run_json(
        capsys, "homogeneity", "--metric", metric_files["ppwave"],
        "--box", "u=-0.5:0.5,v=-1:1,x=0.5:1.5,y=0.2:1.2", "--seed", "5",
    )
    assert doc["results"]["regularity_warning"] is True
    assert doc["results"]["homogeneity"] == 4
    assert doc["results"]["claims_killing_fields"] is False


def test_determinism(capsys, metric_files):
    args = (
        "homogeneity", "--metric", metric_files["revolution"],
        "--box", "x=0:3,y=0:3", "--seed", "7",
    )
    a = run_json(capsys, *args)
    b = run_json(capsys, *args)
    a.pop("wall_time_s")
    b.pop("wall_time_s")
    assert a == b


def test_text_output_contains_same_numbers(capsys, metric_files):
    doc = run_json(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=1.1,y=0.3",
    )
    code, text, _ = run_cli(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=1.1,y=0.3", "--format", "text",
    )
    assert code == 0
    assert str(doc["results"]["scalar_curvature"]) in text
    assert doc["metric_digest"] in text


def test_seed_required_for_homogeneity(capsys, metric_files):
    code, _, _ = run_cli(
        capsys, "homogeneity", "--metric", metric_files["revolution"],
        "--box", "x=0:3,y=0:3",
    )
    assert code == 2


def test_homogeneity_all_singular_exit_3(capsys, tmp_path):
    path = tmp_path / "degenerate.metric"
    path.write_text("dim=2; coords=[x,y]; g[1,1]=0; g[2,2]=1\n")
    code, _, err = run_cli(
        capsys, "homogeneity", "--metric", str(path),
        "--box", "x=0:1,y=0:1", "--seed", "3",
    )
    assert code == 3
    assert "AllPointsSingular" in err


def test_float_round_trip_in_json(capsys, metric_files):
    doc = run_json(
        capsys, "curvature", "--metric", metric_files["sphere2"],
        "--point", "x=1.1,y=0.3",
    )
    value = doc["results"]["g"][1][1]
    import math

    assert value == math.sin(1.1) ** 2  # exact round-trip through JSON
