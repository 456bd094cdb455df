from __future__ import annotations

import json
from pathlib import Path

import pytest

from tropprym import __version__
from tropprym.cli import main
from tropprym.covers import cover_document_to_json
from tropprym.fixtures import COVERS, fixture_directory, fixture_document, load_fixture, load_fixture_divisors


def run(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys: pytest.CaptureFixture[str], *argv: str) -> dict:
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_pbn_dim(capsys: pytest.CaptureFixture[str]) -> None:
    assert run_json(capsys, "pbn-dim", "6", "2", "0") == {"dimension": 2}
    assert run_json(capsys, "pbn-dim", "6", "3") == {"dimension": None, "empty": True}


def test_pbn_count(capsys: pytest.CaptureFixture[str]) -> None:
    assert run_json(capsys, "pbn-count", "4", "2") == {"count": 2}


def test_pbn_count_off_critical_genus_is_a_domain_error(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, err = run(capsys, "pbn-count", "5", "2")
    assert code == 1 and not out and "error" in err


def test_min_symbols(capsys: pytest.CaptureFixture[str]) -> None:
    assert run_json(capsys, "min-symbols", "5", "4") == {"min_symbols": 9}


def test_unsupported_torsion_is_a_domain_error(capsys: pytest.CaptureFixture[str]) -> None:
    code, _, _ = run(capsys, "min-symbols", "3", "3")
    assert code == 1


def test_tableaux_lists_cells(capsys: pytest.CaptureFixture[str]) -> None:
    cells = run_json(capsys, "tableaux", "4", "2")["cells"]
    assert [c["dimension"] for c in cells] == [0, 0]
    assert {json.dumps(c["tableau"]) for c in cells} == {
        "[[1, 2, 4], [3, 4, 6], [4, 5, 7]]",
        "[[1, 3, 4], [2, 4, 5], [4, 6, 7]]",
    }


def test_tableaux_limit(capsys: pytest.CaptureFixture[str]) -> None:
    assert len(run_json(capsys, "tableaux", "6", "2", "--limit", "3")["cells"]) == 3


def test_tableaux_in_parallel_matches_sequential(capsys: pytest.CaptureFixture[str]) -> None:
    assert run_json(capsys, "tableaux", "6", "2", "--jobs", "2") == run_json(capsys, "tableaux", "6", "2")


def test_tableaux_csv(capsys: pytest.CaptureFixture[str]) -> None:
    code, out, _ = run(capsys, "tableaux", "4", "2", "--csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "tableau,dimension,parity,empty"
    assert len(lines) == 3


def test_scalar_csv(capsys: pytest.CaptureFixture[str]) -> None:
    _, out, _ = run(capsys, "pbn-count", "4", "2", "--csv")
    assert out == "count\n2\n"


def test_lattice_report_of_fixture_name(capsys: pytest.CaptureFixture[str]) -> None:
    report = run_json(capsys, "lattice-report", "smiley")
    assert report["prym_rank"] == 1
    assert report["components"] == 1
    assert report["polarization_divisors"] == [1]


def test_lattice_report_of_path(capsys: pytest.CaptureFixture[str]) -> None:
    path = fixture_directory() / "folded_chain_3.json"
    report = run_json(capsys, "lattice-report", str(path))
    assert report["prym_rank"] == 2 and report["polarization_divisors"] == [2, 2]


def test_rank_and_equivalence_on_rank_jump_files(capsys: pytest.CaptureFixture[str]) -> None:
    base = fixture_directory()
    graph = str(base / "rank_jump_source.json")
    assert run_json(capsys, "rank", graph, str(base / "rank_jump_D.json")) == {"rank": 1}
    assert run_json(capsys, "rank", graph, str(base / "rank_jump_D4.json")) == {"rank": 0}
    assert run_json(capsys, "rank", str(base / "rank_jump.json"), str(base / "rank_jump_D.json"), "--scale", "2") == {
        "rank": 1
    }
    out = run_json(capsys, "equiv", graph, str(base / "rank_jump_D2.json"), str(base / "rank_jump_D.json"))
    assert out == {"equivalent": False}


def test_report_envelope(capsys: pytest.CaptureFixture[str]) -> None:
    out = run_json(capsys, "pbn-dim", "5", "2", "--report")
    assert out["command"] == "pbn-dim"
    assert out["inputs"] == {"g": 5, "r": 2, "k": 0}
    assert out["outputs"] == {"dimension": 1}
    assert out["version"] == __version__
    assert out["elapsed"] >= 0


def test_verify_norm(capsys: pytest.CaptureFixture[str]) -> None:
    out = run_json(capsys, "verify-norm", "--count", "40")
    assert out["ok"] and out["checked"] == 40 and out["covers"] == 8


def test_verify_norm_on_one_cover(capsys: pytest.CaptureFixture[str]) -> None:
    out = run_json(capsys, "verify-norm", "--cover", "smiley", "--count", "10")
    assert out["ok"] and out["covers"] == 1


def test_verify_parity(capsys: pytest.CaptureFixture[str]) -> None:
    out = run_json(capsys, "verify-parity", "4", "1", "--samples", "1")
    assert out["ok"] and out["checked"] > 0 and out["failed"] == []


def test_missing_file_is_a_usage_error(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    code, _, err = run(capsys, "lattice-report", str(tmp_path / "nope.json"))
    assert code == 2 and "no such file" in err


def test_bad_arguments_are_usage_errors(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(capsys, "pbn-dim", "x", "2")[0] == 2
    assert run(capsys, "pbn-count", "4", "-1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2


def test_malformed_json_reports_location(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text("{\n  oops\n}")
    code, _, err = run(capsys, "lattice-report", str(path))
    assert code == 1 and f"{path}:2:" in err


def test_invalid_cover_reports_field(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    doc = cover_document_to_json(COVERS["smiley"]())
    doc["target"]["edges"][0]["length"] = "long"
    path = tmp_path / "cover.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "lattice-report", str(path))
    assert code == 1 and "target.edges[0].length" in err


def test_invalid_graph_is_a_domain_error(capsys: pytest.CaptureFixture[str], tmp_path: Path) -> None:
    doc = cover_document_to_json(COVERS["smiley"]())
    doc["target"]["edges"][0]["length"] = -1
    path = tmp_path / "cover.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "lattice-report", str(path))
    assert code == 1 and "non-positive length" in err


def test_version_flag(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(capsys, "--version")[0] == 0


@pytest.mark.parametrize("name", list(COVERS))
def test_shipped_fixture_files_match_builders(name: str) -> None:
    on_disk = json.loads((fixture_directory() / f"{name}.json").read_text())
    assert on_disk == json.loads(json.dumps(fixture_document(name)))
    cover = load_fixture(name)
    assert cover.source == COVERS[name]().source


def test_rank_jump_fixture_carries_divisors() -> None:
    assert set(load_fixture_divisors("rank_jump")) == {"D2", "D3", "D4", "D"}
