"""CLI contract tests, run in-process: stdout must stay pure JSON, stderr
carries the one-line summary, and the exit codes {0,1,2,64,65} are a closed
set."""

import json

import numpy as np
import pytest

from unitball import serialize as ser
from unitball.cli import EXIT_DATA, EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main
from unitball.gen import InstanceSpec, InstanceKind, generate, trace_pinch_map
from unitball.linalg import matrix_unit


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def write_matrix(tmp_path, name, a):
    path = tmp_path / name
    ser.save_json(str(path), ser.matrix_to_obj(np.asarray(a, dtype=complex)))
    return str(path)


def write_superop(tmp_path, name, phi):
    path = tmp_path / name
    ser.save_json(str(path), ser.superop_to_obj(phi))
    return str(path)


# ---------------------------------------------------------- check-extreme


def test_check_extreme_identity_passes(tmp_path, capsys):
    path = write_matrix(tmp_path, "eye.json", np.eye(3))
    code, obj, err = run_json(capsys, "check-extreme", path)
    assert code == EXIT_OK
    assert obj["report"]["verdict"] == "Extreme"
    assert obj["isometry_class"] == "Unitary"
    assert obj["run"]["tool"] == "unitball"
    assert "Extreme" in err


def test_check_extreme_matrix_unit_fails_with_witness(tmp_path, capsys):
    path = write_matrix(tmp_path, "e11.json", matrix_unit(2, 0, 0))
    code, obj, _ = run_json(capsys, "check-extreme", path)
    assert code == EXIT_NEGATIVE
    assert obj["report"]["verdict"] == "NotExtreme"
    assert obj["report"]["witness_index"] == 3
    assert obj["report"]["kadison_residual"] == pytest.approx(1.0)


def test_check_extreme_rectangular_is_out_of_scope(tmp_path, capsys):
    path = write_matrix(tmp_path, "tall.json", np.vstack([np.eye(2), np.zeros((1, 2))]))
    code, obj, _ = run_json(capsys, "check-extreme", path)
    assert code == EXIT_INCONCLUSIVE
    assert obj["verdict"] == "Inconclusive"
    assert obj["isometry_class"] == "Isometry"


def test_check_extreme_with_algebra_file(tmp_path, capsys):
    mpath = write_matrix(tmp_path, "p.json", np.diag([1.0, 0.0]))
    apath = tmp_path / "diag.json"
    ser.save_json(
        str(apath),
        {"n": 2, "elements": [ser.matrix_to_obj(matrix_unit(2, i, i)) for i in range(2)]},
    )
    code, obj, _ = run_json(capsys, "check-extreme", mpath, "--algebra", str(apath))
    assert code == EXIT_NEGATIVE
    assert obj["report"]["witness_index"] == 1


def test_check_extreme_algebra_not_closed_is_data_error(tmp_path, capsys):
    mpath = write_matrix(tmp_path, "m.json", np.eye(2))
    apath = tmp_path / "bad_algebra.json"
    ser.save_json(
        str(apath),
        {"n": 2, "elements": [ser.matrix_to_obj(np.eye(2)), ser.matrix_to_obj(matrix_unit(2, 0, 1))]},
    )
    code, out, err = run(capsys, "check-extreme", mpath, "--algebra", str(apath))
    assert code == EXIT_DATA
    assert out == ""
    assert "error" in err


def test_check_extreme_truncated_json(tmp_path, capsys):
    path = tmp_path / "cut.json"
    path.write_text('{"rows": 2,')
    code, out, err = run(capsys, "check-extreme", str(path))
    assert code == EXIT_DATA
    assert out == ""
    assert "error" in err


def test_check_extreme_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "check-extreme", str(tmp_path / "nope.json"))
    assert code == EXIT_DATA


# --------------------------------------------------------------- classify


def test_classify_identity_superop(tmp_path, capsys):
    phi = generate(InstanceSpec(n=2, kind=InstanceKind.HOM_PRESERVER, seed=7))
    path = write_superop(tmp_path, "hom.json", phi)
    code, obj, err = run_json(capsys, "classify", path)
    assert code == EXIT_OK
    cert = obj["certificate"]
    assert cert["verdict"] == "Preserver"
    assert cert["kind"] == "Hom"
    assert cert["reconstruction_residual"] <= 1e-8
    assert obj["cross_check"]["witness_found"] is False
    assert obj["cross_check"]["agrees"] is True
    assert "Preserver" in err


def test_classify_anti_instance_round_trip(tmp_path, capsys):
    phi = generate(InstanceSpec(n=4, kind=InstanceKind.ANTI_PRESERVER, seed=11))
    path = write_superop(tmp_path, "anti.json", phi)
    code, obj, _ = run_json(capsys, "classify", path)
    assert code == EXIT_OK
    cert = obj["certificate"]
    assert cert["transpose_flag"] is True
    assert cert["reconstruction_residual"] <= 1e-8


def test_classify_trace_pinch_embeds_witness(tmp_path, capsys):
    path = write_superop(tmp_path, "pinch.json", trace_pinch_map(2))
    code, obj, _ = run_json(capsys, "classify", path)
    assert code == EXIT_NEGATIVE
    cert = obj["certificate"]
    assert cert["verdict"] == "NotPreserver"
    assert cert["witness"] is not None
    assert cert["witness_defect"] > 1e-8
    assert obj["cross_check"]["witness_found"] is True
    assert obj["cross_check"]["agrees"] is True


def test_classify_rectangular_reports_multiplicities(tmp_path, capsys):
    phi = generate(InstanceSpec(n=2, kind=InstanceKind.MIXED_JORDAN, seed=3, p=2, q=1))
    path = write_superop(tmp_path, "mixed.json", phi)
    code, obj, _ = run_json(capsys, "classify", path)
    assert code == EXIT_INCONCLUSIVE
    cert = obj["certificate"]
    assert cert["verdict"] == "Inconclusive"
    assert cert["reason"] == "theorem-scope"
    assert (cert["jordan"]["p"], cert["jordan"]["q"]) == (2, 1)


def test_classify_verdict_is_reproducible(tmp_path, capsys):
    phi = generate(InstanceSpec(n=3, kind=InstanceKind.HOM_PRESERVER, seed=5))
    path = write_superop(tmp_path, "again.json", phi)
    _, obj1, _ = run_json(capsys, "classify", path, "--seed", "21")
    _, obj2, _ = run_json(capsys, "classify", path, "--seed", "21")
    # everything except wall time is bit-identical
    assert obj1["certificate"] == obj2["certificate"]
    assert obj1["cross_check"] == obj2["cross_check"]


# ------------------------------------------------------------------- make


def test_make_writes_parseable_file(tmp_path, capsys):
    out = tmp_path / "made.json"
    code, obj, _ = run_json(
        capsys, "make", "--kind", "hom", "--n", "2", "--seed", "7", "--out", str(out)
    )
    assert code == EXIT_OK
    assert obj["instance"] == {
        "n": 2, "kind": "hom", "seed": 7, "p": 0, "q": 0, "epsilon": 0.0,
    }
    phi = ser.superop_from_obj(ser.load_json(str(out)))
    assert np.array_equal(phi.matrix, generate(InstanceSpec(n=2, kind=InstanceKind.HOM_PRESERVER, seed=7)).matrix)


def test_make_then_classify_pipeline(tmp_path, capsys):
    out = tmp_path / "mk.json"
    code, _, _ = run(
        capsys, "make", "--kind", "mixed", "--n", "2", "--p", "2", "--q", "1",
        "--seed", "3", "--out", str(out),
    )
    assert code == EXIT_OK
    code, obj, _ = run_json(capsys, "classify", str(out))
    assert code == EXIT_INCONCLUSIVE
    assert (obj["certificate"]["jordan"]["p"], obj["certificate"]["jordan"]["q"]) == (2, 1)


def test_make_to_stdout_without_out_flag(tmp_path, capsys):
    code, obj, _ = run_json(capsys, "make", "--kind", "trace-pinch", "--n", "3", "--seed", "0")
    assert code == EXIT_OK
    phi = ser.superop_from_obj(obj)
    assert (phi.dim_in, phi.dim_out) == (3, 3)


def test_make_invalid_dimension_is_usage_error(capsys):
    code, out, err = run(capsys, "make", "--kind", "hom", "--n", "0", "--seed", "1")
    assert code == EXIT_USAGE
    assert out == ""
    assert "error" in err


def test_make_mixed_without_blocks_is_usage_error(capsys):
    code, _, _ = run(capsys, "make", "--kind", "mixed", "--n", "2", "--seed", "1")
    assert code == EXIT_USAGE


def test_make_unknown_kind_is_usage_error(capsys):
    code, _, _ = run(capsys, "make", "--kind", "banana", "--n", "2", "--seed", "1")
    assert code == EXIT_USAGE


# ------------------------------------------------------ verify-identities


def test_verify_identities_identity_map(tmp_path, capsys):
    phi = generate(InstanceSpec(n=2, kind=InstanceKind.HOM_PRESERVER, seed=1))
    path = write_superop(tmp_path, "v.json", phi)
    code, obj, err = run_json(capsys, "verify-identities", path)
    assert code == EXIT_OK
    assert obj["pass"] is True
    assert max(obj["residuals"].values()) <= 1e-12
    assert "PASS" in err


def test_verify_identities_trace_pinch_fails_on_square_identity(tmp_path, capsys):
    path = write_superop(tmp_path, "p.json", trace_pinch_map(2))
    code, obj, err = run_json(capsys, "verify-identities", path)
    assert code == EXIT_NEGATIVE
    assert obj["pass"] is False
    assert obj["residuals"]["hermitian_square"] > 0.1
    assert "FAIL" in err


def test_verify_identities_rectangular(tmp_path, capsys):
    phi = generate(InstanceSpec(n=2, kind=InstanceKind.MIXED_JORDAN, seed=1, p=1, q=1))
    path = write_superop(tmp_path, "r.json", phi)
    code, obj, _ = run_json(capsys, "verify-identities", path)
    assert code == EXIT_INCONCLUSIVE
    assert obj["reason"] == "theorem-scope"


# ------------------------------------------------------------ global cli


def test_no_arguments_is_usage_error(capsys):
    assert run(capsys, )[0] == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == EXIT_OK
    assert run(capsys, "classify", "--help")[0] == EXIT_OK


def test_version_exits_zero(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == EXIT_OK


def test_unknown_flag_is_usage_error(tmp_path, capsys):
    path = write_matrix(tmp_path, "m.json", np.eye(2))
    code, _, _ = run(capsys, "check-extreme", path, "--frobnicate")
    assert code == EXIT_USAGE


def test_exit_codes_form_a_closed_set(tmp_path, capsys):
    """Every invocation in a broad battery lands in {0, 1, 2, 64, 65}."""
    eye = write_matrix(tmp_path, "eye.json", np.eye(2))
    e11 = write_matrix(tmp_path, "e11.json", matrix_unit(2, 0, 0))
    pinch = write_superop(tmp_path, "pinch.json", trace_pinch_map(2))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    battery = [
        ["check-extreme", eye],
        ["check-extreme", e11],
        ["check-extreme", str(broken)],
        ["classify", pinch],
        ["classify", str(broken)],
        ["make", "--kind", "hom", "--n", "0", "--seed", "1"],
        ["make", "--kind", "hom", "--n", "2", "--seed", "1", "--out", str(tmp_path / "x.json")],
        ["verify-identities", pinch],
        ["nonsense-command"],
        [],
    ]
    for argv in battery:
        code = main(argv)
        capsys.readouterr()
        assert code in {EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_DATA}, argv


def test_stdout_is_pure_json_for_reports(tmp_path, capsys):
    path = write_matrix(tmp_path, "eye.json", np.eye(2))
    _, out, err = run(capsys, "check-extreme", path)
    json.loads(out)  # no banner, no color codes
    assert err.strip() != ""
