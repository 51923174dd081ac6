import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.main import run
from app.schemas.matrix_schema import MatrixDocument
from app.services.generators import random_of_rank, random_well_conditioned, trial_rng


@pytest.fixture
def map_file(tmp_path):
    def _write(document, name="map.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


def matrix_dict(M):
    return MatrixDocument.from_matrix(M).model_dump(exclude_none=True)


def invoke(capsys, read_report, argv):
    code = run(argv)
    records = read_report(capsys.readouterr().out)
    return code, records


def test_spectrum_command(capsys, read_report, matrix_file):
    code, records = invoke(capsys, read_report, ["spectrum", "--in", str(matrix_file(np.diag([1.0, 2.0, 2.0])))])
    assert code == 0
    assert [r["record"] for r in records] == ["header", "result", "summary"]
    header, result, summary = records
    assert header["command"] == "spectrum"
    assert header["tolerance"]["zero"] == 1e-8
    assert sorted(v[0] for v in result["payload"]["spectrum"]) == pytest.approx([1.0, 2.0])
    assert summary["exit_code"] == 0


def test_tolerance_flags_reach_the_header(capsys, read_report, matrix_file):
    path = matrix_file(np.eye(2))
    code, records = invoke(capsys, read_report, ["spectrum", "--in", str(path), "--tol-distinct", "1e-4"])
    assert code == 0
    assert records[0]["tolerance"]["distinct"] == 1e-4


def test_invalid_tolerance_is_usage_error(capsys, read_report, matrix_file):
    path = matrix_file(np.eye(2))
    code, records = invoke(capsys, read_report, ["spectrum", "--in", str(path), "--tol-match", "1e-3"])
    assert code == 2
    assert records[1]["error"] == "SchemaError"


def test_product_with_signature(capsys, read_report, matrix_file):
    A = matrix_file(np.eye(2), "a.json")
    B = matrix_file(np.diag([1.0, 3.0]), "b.json")
    code, records = invoke(capsys, read_report, ["product", "--in", str(A), str(B), "--signature", "1,2"])
    assert code == 0
    payload = records[1]["payload"]
    assert (payload["r"], payload["s"]) == (0, 1)
    assert_allclose(MatrixDocument.model_validate(payload["product"]).to_matrix(), np.diag([2.0, 6.0]))


def test_two_slot_product_needs_two_inputs(capsys, read_report, matrix_file):
    A = matrix_file(np.eye(2))
    code, records = invoke(capsys, read_report, ["product", "--in", str(A)])
    assert code == 2
    assert records[1]["error"] == "DimensionMismatch"


def test_classify_rank_one(capsys, read_report, matrix_file):
    path = matrix_file(random_of_rank(trial_rng(61, 0), 4, 1))
    code, records = invoke(capsys, read_report, ["classify-rank", "--in", str(path), "--budget", "20"])
    assert code == 0
    assert records[1]["payload"]["verdict"] == "RankOne"


def test_witness_command(capsys, read_report, matrix_file):
    path = matrix_file(np.diag([1.0, 2.0, 3.0]))
    code, records = invoke(capsys, read_report, ["witness", "--in", str(path), "--r", "0", "--s", "1"])
    assert code == 0
    assert records[1]["payload"]["distinct_nonzero"] >= 3


def test_witness_precondition_is_usage_error(capsys, read_report, matrix_file):
    path = matrix_file(random_of_rank(trial_rng(62, 0), 3, 1))
    code, records = invoke(capsys, read_report, ["witness", "--in", str(path)])
    assert code == 2
    assert records[1]["error"] == "PreconditionViolated"
    assert records[-1]["exit_code"] == 2


def test_fuzz_command_writes_trials_in_order(capsys, read_report):
    code, records = invoke(capsys, read_report, ["fuzz", "--lemma", "2.8", "--n", "3", "--trials", "5", "--r", "0", "--s", "1"])
    assert code == 0
    body = [r for r in records if r["record"] == "result"]
    assert [r["trial"] for r in body] == list(range(5))
    assert records[-1]["trials"] == 5 and records[-1]["passes"] == 5


def test_reconstruct_command(capsys, read_report, matrix_file):
    path = matrix_file(random_of_rank(trial_rng(63, 0), 3, 2))
    code, records = invoke(capsys, read_report, ["reconstruct", "--in", str(path)])
    assert code == 0
    assert records[1]["payload"]["relative_error"] <= 1e-8


def test_recover_command_matches_generator(capsys, read_report, map_file):
    T = random_well_conditioned(trial_rng(64, 0), 3)
    path = map_file({"kind": "similarity", "n": 3, "lam": [0.0, 1.0], "T": matrix_dict(T)})
    code, records = invoke(capsys, read_report, ["recover", "--map", str(path)])
    assert code == 0
    payload = records[1]["payload"]
    assert payload["matches_generator"]
    assert payload["lambda"] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_recover_2x2_method(capsys, read_report, map_file):
    T = random_well_conditioned(trial_rng(65, 0), 2)
    path = map_file({"kind": "similarity", "n": 2, "T": matrix_dict(T), "transposed": True})
    code, records = invoke(capsys, read_report, ["recover", "--map", str(path), "--method", "2x2"])
    assert code == 0
    assert records[1]["payload"]["transposed"]


def test_verify_reports_counterexample(capsys, read_report, map_file):
    images = [matrix_dict(2 * np.eye(2)[[k // 2]].T @ np.eye(2)[[k % 2]]) for k in range(4)]
    path = map_file({"kind": "table", "n": 2, "images": images})
    code, records = invoke(capsys, read_report, ["verify", "--map", str(path), "--trials", "8"])
    assert code == 1
    failures = [r for r in records if r["record"] == "failure"]
    assert len(failures) == 1
    assert failures[0]["seed"] == 0


def test_recover_rejects_non_preserver(capsys, read_report, map_file):
    images = [matrix_dict(2 * np.eye(3)[[k // 3]].T @ np.eye(3)[[k % 3]]) for k in range(9)]
    path = map_file({"kind": "table", "n": 3, "images": images})
    code, records = invoke(capsys, read_report, ["recover", "--map", str(path)])
    assert code == 1
    assert records[1]["error"] == "HypothesisViolated"


def test_malformed_input_is_usage_error(capsys, read_report, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 3, "data": []}', encoding="utf-8")
    code, records = invoke(capsys, read_report, ["spectrum", "--in", str(path)])
    assert code == 2
    assert records[1]["error"] == "SchemaError"
    assert records[1]["context"]["diagnostics"]


def test_missing_file_is_usage_error(capsys, read_report, tmp_path):
    code, records = invoke(capsys, read_report, ["spectrum", "--in", str(tmp_path / "absent.json")])
    assert code == 2


def test_out_flag_writes_report_file(capsys, read_report, matrix_file, tmp_path):
    out = tmp_path / "report.jsonl"
    code = run(["spectrum", "--in", str(matrix_file(np.eye(2))), "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    records = read_report(out.read_text(encoding="utf-8"))
    assert records[0]["record"] == "header"
    assert records[-1]["record"] == "summary"


def test_identical_runs_differ_only_in_wall_time(capsys, read_report):
    argv = ["fuzz", "--lemma", "2.10", "--n", "3", "--trials", "4", "--r", "0", "--s", "1", "--seed", "9"]
    _, first = invoke(capsys, read_report, argv)
    _, second = invoke(capsys, read_report, argv)
    for records in (first, second):
        records[-1].pop("wall_time")
    assert first == second


def test_unknown_subcommand_exits_with_usage_status():
    with pytest.raises(SystemExit) as info:
        run(["transmogrify"])
    assert info.value.code == 2


def test_fuzz_forwards_worker_count(capsys, read_report, mocker):
    from app.commands import fuzz_command

    spy = mocker.spy(fuzz_command, "run_campaign")
    code, _ = invoke(capsys, read_report, ["fuzz", "--lemma", "2.8", "--n", "3", "--trials", "2", "--r", "0", "--s", "1", "--workers", "3"])
    assert code == 0
    assert spy.call_args.kwargs["workers"] == 3


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["recover", "--map", "artifacts/similarity_map.json"], 0),
        (["recover", "--map", "artifacts/unitary_transpose_map.json", "--method", "selfadjoint", "--r", "0", "--s", "1"], 0),
        (["verify", "--map", "artifacts/scaled_table_map.json", "--trials", "8"], 1),
        (["classify-rank", "--in", "artifacts/square_zero_rank_two.json", "--r", "0", "--s", "1", "--budget", "20"], 0),
        (["witness", "--in", "artifacts/cyclic_nilpotent.json"], 0),
    ],
)
def test_bundled_artifacts(capsys, read_report, monkeypatch, argv, expected):
    monkeypatch.chdir(Path(__file__).parent)
    code, records = invoke(capsys, read_report, argv)
    assert code == expected
    assert records[-1]["exit_code"] == expected
