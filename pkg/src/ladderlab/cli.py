"""Command-line front end.

Commands: qnum, qbinom, paths, eval, relcheck, clasp, kappa, gamma,
conjecture, dims, weyldim. Output is JSON by default (sorted keys), with
--format csv or text where meaningful. Exit codes: 0 success, 1 a
mathematical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .clasp import ClaspContext, weyl_dim
from .errors import LadderLabError, ParseError, ValidationError
from .evaluation import (
    RELATIONS,
    eval_ladder,
    hom_rank,
    path_pair_count,
    relation_sweep,
)
from .qring import RatFun, qbinom, qint, specialize
from .webs import Ladder
from .weights import GlWeight, SlWeight, canonical_sequence, enumerate_paths

USAGE_ERROR = 2
CHECK_FAILED = 1


def _parse_word(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x != "")
    except ValueError as exc:
        raise ParseError(f"bad word {text!r}") from exc


def _parse_q(text: str) -> Fraction:
    if text.startswith("q="):
        text = text[2:]
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def load_ladder(path: str | Path) -> Ladder:
    """Parse and validate a ladder JSON file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return Ladder.from_json(data)


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows, out, sort_keys=True, indent=1, default=str)
        out.write("\n")
    elif fmt == "csv":
        if rows:
            writer = csv.DictWriter(out, fieldnames=sorted(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    else:
        for row in rows:
            out.write(" ".join(f"{k}={row[k]}" for k in sorted(row)) + "\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--cache-dir", default=None, help="clasp cache directory")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ladderlab")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qnum", help="print a quantum integer")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("qbinom", help="print a quantum binomial")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("paths", help="enumerate dominant weight subsequences")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--target", default=None)
    p.add_argument("--count", action="store_true")
    _add_common(p)

    p = sub.add_parser("eval", help="evaluate a ladder file to a matrix")
    p.add_argument("--ladder", required=True, help="path to a ladder JSON file")
    p.add_argument("--at", default=None, help="exact specialization q=RATIONAL")
    _add_common(p)

    p = sub.add_parser("relcheck", help="verify web relations as matrix identities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relation", default="all", choices=RELATIONS + ("all",))
    _add_common(p)

    p = sub.add_parser("clasp", help="compute a clasp by the triple clasp recursion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--out", default=None, help="write the full matrix JSON here")
    _add_common(p)

    p = sub.add_parser("kappa", help="local intersection forms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument(
        "--method",
        default="all",
        choices=("matrix", "conjecture", "recursive", "all"),
    )
    _add_common(p)

    p = sub.add_parser("gamma", help="the gamma coefficient of the kappa recursion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    _add_common(p)

    p = sub.add_parser("conjecture", help="sweep-compare the three kappa methods")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--level-bound", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument(
        "--no-entrywise",
        action="store_true",
        help="skip the entrywise proportionality assertion (faster sweeps)",
    )
    _add_common(p)

    p = sub.add_parser("dims", help="hom-space rank vs path-pair count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--word", required=True, help="source word")
    p.add_argument("--target", required=True, help="target word")
    _add_common(p)

    p = sub.add_parser("weyldim", help="Weyl dimension of an irreducible")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--q", dest="quantum", action="store_true", help="quantum dimension")
    _add_common(p)

    return top


def _cmd_qnum(args, out) -> int:
    out.write(str(qint(args.k)) + "\n")
    return 0


def _cmd_qbinom(args, out) -> int:
    out.write(str(qbinom(args.m, args.k)) + "\n")
    return 0


def _cmd_paths(args, out) -> int:
    word = _parse_word(args.word)
    target = SlWeight.parse(args.target, args.n) if args.target is not None else None
    paths = enumerate_paths(word, args.n, target)
    if args.count:
        out.write(f"{len(paths)}\n")
        return 0
    rows = [
        {
            "steps": str(p),
            "endpoint": str(p.endpoint),
            "prefixes": [str(w) for w in p.prefix_weights],
        }
        for p in paths
    ]
    _emit(rows, args.format, out)
    return 0


def _cmd_eval(args, out) -> int:
    ladder = load_ladder(args.ladder)
    mat = eval_ladder(ladder)
    if args.at is not None:
        value = _parse_q(args.at)
        spec = mat.specialize(value)
        data = {
            "rows": mat.rows.dim,
            "cols": mat.cols.dim,
            "at": str(value),
            "entries": [
                [i, j, str(spec[(i, j)])] for (i, j) in sorted(spec) if spec[(i, j)]
            ],
        }
    else:
        data = mat.to_json()
    json.dump(data, out, sort_keys=True, indent=1)
    out.write("\n")
    return 0


def _cmd_relcheck(args, out) -> int:
    relations = RELATIONS if args.relation == "all" else (args.relation,)
    rows = []
    ok = True
    for rel in relations:
        for case in relation_sweep(rel, args.n):
            ok = ok and case.ok
            rows.append(
                {
                    "relation": case.relation,
                    "labels": ",".join(map(str, case.labels)),
                    "mirrored": case.mirrored,
                    "ok": case.ok,
                    "detail": case.detail,
                }
            )
    _emit(rows, args.format, out)
    return 0 if ok else CHECK_FAILED


def _cmd_clasp(args, out) -> int:
    lam = SlWeight.parse(args.lam, args.n)
    ctx = ClaspContext(args.n, cache_dir=args.cache_dir)
    rec = ctx.clasp(lam)
    summary = {
        "n": args.n,
        "lambda": str(lam),
        "sequence": list(rec.sequence),
        "dim": rec.matrix.rows.dim,
        "nnz": rec.matrix.nnz(),
        "rank": rec.rank,
        "weyl_dim": weyl_dim(lam),
        "den": str(rec.matrix.den),
    }
    if args.out:
        Path(args.out).write_text(
            json.dumps(rec.matrix.to_json(), sort_keys=True)
        )
    json.dump(summary, out, sort_keys=True, indent=1)
    out.write("\n")
    return 0 if rec.rank == summary["weyl_dim"] else CHECK_FAILED


def _cmd_kappa(args, out) -> int:
    lam = SlWeight.parse(args.lam, args.n)
    mu = GlWeight.parse(args.mu)
    ctx = ClaspContext(args.n, cache_dir=args.cache_dir)
    row = {"n": args.n, "lambda": str(lam), "mu": str(mu)}
    methods = (
        ("matrix", "conjecture", "recursive")
        if args.method == "all"
        else (args.method,)
    )
    values = {}
    for m in methods:
        if m == "matrix":
            values[m] = ctx.kappa_matrix(lam, mu)
        elif m == "conjecture":
            values[m] = ctx.kappa_conjecture(lam, mu)
        elif m == "recursive":
            if args.n > 4:
                continue
            values[m] = ctx.kappa_recursive(lam, mu)
        row[f"kappa_{m}"] = str(values[m])
    agree = len(set(map(str, values.values()))) <= 1
    row["agree"] = agree
    _emit([row], args.format, out)
    return 0 if agree else CHECK_FAILED


def _cmd_gamma(args, out) -> int:
    lam = SlWeight.parse(args.lam, args.n)
    mu = GlWeight.parse(args.mu)
    nu = GlWeight.parse(args.nu)
    ctx = ClaspContext(args.n, cache_dir=args.cache_dir)
    value = ctx.gamma(lam, mu, nu)
    _emit(
        [{"n": args.n, "lambda": str(lam), "mu": str(mu), "nu": str(nu), "gamma": str(value)}],
        args.format,
        out,
    )
    return 0


def _sweep_worker(task):
    n, level, cache_dir, coords, check = task
    ctx = ClaspContext(n, cache_dir=cache_dir)
    lam = SlWeight(coords)
    rows = []
    from .weights import omega_set

    for a in range(1, n):
        for mu in omega_set(a, n):
            if not ctx.add_mu(lam, mu).is_dominant():
                continue
            km = ctx.kappa_matrix(lam, mu, check_proportional=check)
            kc = ctx.kappa_conjecture(lam, mu)
            row = {
                "n": n,
                "lambda": str(lam),
                "mu": str(mu),
                "kappa_matrix": str(km),
                "kappa_conjecture": str(kc),
                "kappa_recursive": "",
                "agree": km == kc,
            }
            if n <= 4:
                kr = ctx.kappa_recursive(lam, mu)
                row["kappa_recursive"] = str(kr)
                row["agree"] = row["agree"] and kr == km
            rows.append(row)
    return rows


def _cmd_conjecture(args, out) -> int:
    from .weights import dominant_weights_up_to

    check = not args.no_entrywise
    if args.jobs > 1:
        if not args.cache_dir:
            raise ValidationError("--jobs > 1 requires --cache-dir for shared work")
        import multiprocessing as mp

        tasks = [
            (args.n, args.level_bound, args.cache_dir, lam.coords, check)
            for lam in dominant_weights_up_to(args.n, args.level_bound)
        ]
        with mp.Pool(args.jobs) as pool:
            chunks = pool.map(_sweep_worker, tasks)
        rows = [r for chunk in chunks for r in chunk]
        rows.sort(key=lambda r: (r["lambda"], r["mu"]))
    else:
        ctx = ClaspContext(args.n, cache_dir=args.cache_dir)
        rows = ctx.conjecture_sweep(args.level_bound, check_proportional=check)
    _emit(rows, args.format, out)
    return 0 if all(r["agree"] for r in rows) else CHECK_FAILED


def _cmd_dims(args, out) -> int:
    source = _parse_word(args.word)
    target = _parse_word(args.target)
    rank = hom_rank(source, target, args.n)
    count = path_pair_count(source, target, args.n)
    row = {
        "n": args.n,
        "source": args.word,
        "target": args.target,
        "hom_rank": rank,
        "path_pairs": count,
        "agree": rank == count,
    }
    _emit([row], args.format, out)
    return 0 if rank == count else CHECK_FAILED


def _cmd_weyldim(args, out) -> int:
    lam = SlWeight.parse(args.lam, args.n)
    if args.quantum:
        out.write(str(weyl_dim(lam, at_q_one=False)) + "\n")
    else:
        out.write(str(weyl_dim(lam)) + "\n")
    return 0


_HANDLERS = {
    "qnum": _cmd_qnum,
    "qbinom": _cmd_qbinom,
    "paths": _cmd_paths,
    "eval": _cmd_eval,
    "relcheck": _cmd_relcheck,
    "clasp": _cmd_clasp,
    "kappa": _cmd_kappa,
    "gamma": _cmd_gamma,
    "conjecture": _cmd_conjecture,
    "dims": _cmd_dims,
    "weyldim": _cmd_weyldim,
}


def run(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    if getattr(args, "n", 2) < 2:
        err.write("error: --n must be at least 2\n")
        return USAGE_ERROR
    try:
        return _HANDLERS[args.command](args, out)
    except (ParseError, ValidationError) as exc:
        err.write(f"error: {exc}\n")
        return USAGE_ERROR
    except LadderLabError as exc:
        err.write(f"error: {exc}\n")
        return USAGE_ERROR


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
