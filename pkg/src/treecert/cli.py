"""``treecert`` command line.

Exit status is 0 when every assertion passes, 1 when one fails and 2 when the
input cannot be used (unknown problem, bad parameters, malformed tree file).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import report as R
from .certificate import CertificateError
from .treefile import TreeFileError, load_tree_file

COMMANDS = ("analyze", "certify", "span", "ensemble", "sweep", "validate")


def parse_value(text: str):
    """``5`` -> 5, ``0.5`` -> 0.5, ``[1,2]`` -> [1, 2], ``true`` -> True, anything else stays text."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_pairs(items: list[str] | None, what: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise R.InputError(f"{what} must look like key=value, got {item!r}")
        out[key] = parse_value(val)
    return out


def parse_range(text: str) -> tuple[str, list]:
    """``n=4..8`` or ``n=3,5,7``."""
    key, sep, val = text.partition("=")
    if not sep:
        raise R.InputError(f"range must look like name=a..b, got {text!r}")
    if ".." in val:
        lo, hi = val.split("..", 1)
        try:
            return key, list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise R.InputError(f"bad range bounds in {text!r}") from None
    return key, [parse_value(v) for v in val.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treecert",
                                description="Certify quantum query bounds of colored decision trees.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--problem", help="catalog problem name (see --list)")
    src.add_argument("--tree", metavar="FILE", help="JSON tree document")
    p.add_argument("--params", nargs="*", metavar="K=V", help="problem parameters")
    p.add_argument("--range", dest="sweep_range", metavar="K=A..B", help="swept parameter (sweep)")
    p.add_argument("--mode", default="exhaustive", help="exhaustive | sampled:N (pair checks)")
    p.add_argument("--weights", default="default",
                   help="default | generation | const:B,R | file:PATH")
    p.add_argument("--family", default="per-vertex", choices=("per-vertex", "paper"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="CSV output; the summary goes next to it as .json")
    p.add_argument("--tolerance", nargs="*", metavar="K=V",
                   help="overrides for residual, family, oracle")
    p.add_argument("--list", action="store_true", help="print catalog problem names and exit")
    return p


def _instance(args, params: dict) -> R.Instance:
    if args.tree:
        tree, fn = load_tree_file(args.tree)
        return R.Instance(tree.name, {}, tree, fn)
    if not args.problem:
        raise R.InputError("one of --problem or --tree is required")
    return R.catalog_instance(args.problem, params)


def run(args) -> R.Report:
    params = parse_pairs(args.params, "--params")
    tol = {k: float(v) for k, v in parse_pairs(args.tolerance, "--tolerance").items()}
    unknown = set(tol) - set(R.DEFAULT_TOLERANCES)
    if unknown:
        raise R.InputError(f"unknown tolerance keys {sorted(unknown)}")
    if args.command == "sweep":
        if not args.problem or not args.sweep_range:
            raise R.InputError("sweep needs --problem and --range")
        key, values = parse_range(args.sweep_range)
        if "seed" not in params and args.problem.startswith(("matrix.", "list.")):
            params["seed"] = args.seed
        return R.run_sweep(args.problem, key, values, params, seed=args.seed, family=args.family)
    inst = _instance(args, params)
    if args.command == "validate":
        return R.run_validate(inst)
    if args.command == "analyze":
        return R.run_analyze(inst)
    if args.command == "certify":
        return R.run_certify(inst, args.weights, args.mode, args.family, args.seed, tol)
    if args.command == "ensemble":
        return R.run_ensemble(inst, args.weights, args.mode, args.family, args.seed, tol)
    return R.run_span(inst, args.weights)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        from .catalog import problem_names

        print("\n".join(problem_names()))
        return 0
    try:
        rep = run(args)
    except (R.InputError, TreeFileError, CertificateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep.summary["seed"] = args.seed
    if args.out:
        csv_path, json_path = rep.write(args.out)
        print(rep.summary_text())
    else:
        sys.stdout.write(rep.csv_text())
        print("# summary " + rep.summary_text())
    if not rep.passed:
        print("assertion failed: " + ", ".join(_failures(rep)), file=sys.stderr)
    return 0 if rep.passed else 1


def _failures(rep: R.Report) -> list[str]:
    names = [str(r.get("bound_id") or r.get("quantity") or r.get("instance"))
             for r in rep.rows if r.get("pass") is False]
    return names or ["see report"]


if __name__ == "__main__":
    sys.exit(main())
