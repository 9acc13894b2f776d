from __future__ import annotations

import json

import pytest

from treecert.cli import main, parse_range


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _tree_doc(colors=("black", "red")):
    return {
        "n": 1, "ell": 2, "root": "r",
        "states": {"r": {"query": 1, "blocks": [[0], [1]], "colors": list(colors),
                         "children": ["a", "b"]}},
        "leaves": {"a": {"label": 0}, "b": {"label": 1}},
    }


def test_list(capsys):
    code, out, _ = _run(capsys, "analyze", "--list")
    assert code == 0 and "two_twos" in out.split()


def test_certify_passes(capsys):
    code, out, _ = _run(capsys, "certify", "--problem", "two_twos", "--params", "n=6")
    assert code == 0
    summary = json.loads(out.rsplit("# summary ", 1)[1])
    assert summary["residual"] <= 1e-9 and summary["instance"].startswith("two_twos")


def test_certify_tree_file(tmp_path, capsys):
    path = tmp_path / "bit.json"
    path.write_text(json.dumps(_tree_doc()))
    code, _, _ = _run(capsys, "certify", "--tree", str(path))
    assert code == 0


def test_bad_coloring_rejected(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(_tree_doc(("black", "black"))))
    code, _, err = _run(capsys, "certify", "--tree", str(path))
    assert code == 2 and "G-coloring" in err


def test_malformed_tree_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 1}')
    assert _run(capsys, "validate", "--tree", str(path))[0] == 2


@pytest.mark.parametrize("argv", [
    ("certify", "--problem", "nope"),
    ("certify", "--problem", "search", "--params", "n=0"),
    ("certify", "--problem", "search", "--params", "n"),
    ("certify",),
    ("certify", "--problem", "search", "--params", "n=3", "--tolerance", "bogus=1"),
])
def test_input_errors(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_span_two_twos_fails(capsys):
    code, _, err = _run(capsys, "span", "--problem", "two_twos", "--params", "n=5")
    assert code == 1 and "assertion failed" in err


def test_span_search_passes(capsys):
    assert _run(capsys, "span", "--problem", "search", "--params", "n=5")[0] == 0


def test_out_files_reproducible(tmp_path, capsys):
    def once(tag):
        out = tmp_path / f"{tag}.csv"
        code, _, _ = _run(capsys, "certify", "--problem", "search", "--params", "n=5",
                          "--mode", "sampled:300", "--seed", "7", "--out", str(out))
        assert code == 0
        return out.read_bytes(), out.with_suffix(".json").read_bytes()

    a, b = once("a"), once("b")
    assert a == b
    header = a[0].decode().splitlines()[0]
    assert "bound_id" in header
    assert json.loads(a[1])["seed"] == 7


def test_ensemble(capsys):
    code, out, _ = _run(capsys, "ensemble", "--problem", "min", "--params", "n=3")
    assert code == 0
    summary = json.loads(out.rsplit("# summary ", 1)[1])
    assert summary["K"] == 6


def test_analyze_and_validate(capsys):
    assert _run(capsys, "analyze", "--problem", "threshold", "--params", "n=4", "k=1")[0] == 0
    assert _run(capsys, "validate", "--problem", "list.bfs_tree", "--params", "n=3")[0] == 0


def test_sweep(capsys):
    code, out, _ = _run(capsys, "sweep", "--problem", "search", "--range", "n=2..5")
    assert code == 0
    rows = [line for line in out.splitlines() if line and not line.startswith("#")]
    assert len(rows) == 1 + 4


def test_parse_range():
    assert parse_range("n=3..5") == ("n", [3, 4, 5])
    assert parse_range("k=1,4") == ("k", [1, 4])
