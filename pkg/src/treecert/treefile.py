"""Explicit trees stored as JSON documents.

Layout::

    {
      "n": 2, "ell": 2, "root": "r",
      "states": {"r": {"query": 1, "blocks": [[0], [1]],
                       "colors": ["black", "red"], "children": ["a", "b"]}, ...},
      "leaves": {"a": {"label": 0}, ...},
      "function": {"table": [[[0, 1], 0], ...]}     # optional
    }

Without a ``function`` entry the tree is checked against its own leaf function
on all of ``[ell]^n``.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Hashable
from pathlib import Path

from .model import COLORS, FunctionSpec, PartitionError, Query, TreeError, TreeProgram, evaluate_path


class TreeFileError(ValueError):
    """The document does not describe a tree."""


def _label(v) -> Hashable:
    return tuple(_label(a) for a in v) if isinstance(v, list) else v


class FileTree(TreeProgram):
    """Tree given by explicit state and leaf tables."""

    def __init__(self, doc: dict, name: str = ""):
        try:
            n, ell = int(doc["n"]), int(doc["ell"])
            states, leaves = doc["states"], doc.get("leaves", {})
            root = doc.get("root", next(iter(states), None))
        except (KeyError, TypeError, ValueError) as exc:
            raise TreeFileError(f"tree document needs n, ell and states: {exc}") from None
        if n < 1 or ell < 1:
            raise TreeFileError(f"n and ell must be positive, got n={n} ell={ell}")
        super().__init__(n, ell, name=name or doc.get("name", "file"))
        self.query_once = bool(doc.get("query_once", True))
        self.root_id = root
        self.queries: dict[str, Query] = {}
        self.children: dict[str, list[str]] = {}
        self.labels = {k: _label(v.get("label") if isinstance(v, dict) else v) for k, v in leaves.items()}
        for sid, s in states.items():
            try:
                blocks, colors, kids = s["blocks"], s["colors"], s["children"]
                q = Query.of(int(s["query"]), blocks, colors, ell)
            except PartitionError as exc:
                raise TreeFileError(f"state {sid!r}: {exc}") from None
            except (KeyError, TypeError, ValueError) as exc:
                raise TreeFileError(f"state {sid!r} is malformed: {exc}") from None
            if len(colors) != len(blocks) or len(kids) != len(blocks):
                raise TreeFileError(f"state {sid!r}: blocks, colors and children differ in length")
            if any(c not in COLORS for c in colors):
                raise TreeFileError(f"state {sid!r}: colors must be 'black' or 'red'")
            for k in kids:
                if k not in states and k not in self.labels:
                    raise TreeFileError(f"state {sid!r} points to unknown vertex {k!r}")
            self.queries[sid] = q
            self.children[sid] = list(kids)
        if root not in self.queries and root not in self.labels:
            raise TreeFileError(f"root {root!r} is not a state or leaf")

    def program(self):
        node = self.root_id
        while node in self.queries:
            b = yield self.queries[node]
            node = self.children[node][b]
        return self.labels[node]


def load_tree_document(doc: dict, name: str = "") -> tuple[FileTree, FunctionSpec]:
    tree = FileTree(doc, name)
    fn_doc = doc.get("function")
    if fn_doc is None:
        table = {}
        for x in itertools.product(range(tree.ell), repeat=tree.n):
            try:
                table[x] = evaluate_path(tree, x).leaf_label
            except (TreeError, ValueError) as exc:
                raise TreeFileError(f"tree cannot be evaluated on {x}: {exc}") from None
        return tree, FunctionSpec.from_table(tree.n, tree.ell, table, name=tree.name)
    try:
        table = {tuple(x): _label(v) for x, v in fn_doc["table"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise TreeFileError(f"function table is malformed: {exc}") from None
    for x in table:
        if len(x) != tree.n or any(not 0 <= v < tree.ell for v in x):
            raise TreeFileError(f"function input {x} is not in [{tree.ell}]^{tree.n}")
    return tree, FunctionSpec.from_table(tree.n, tree.ell, table, m=fn_doc.get("m"), name=tree.name)


def load_tree_file(path: str | Path) -> tuple[FileTree, FunctionSpec]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TreeFileError(f"cannot read {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise TreeFileError(f"{path} does not hold a JSON object")
    return load_tree_document(doc, name=path.stem)
