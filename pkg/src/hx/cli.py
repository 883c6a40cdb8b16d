"""``hx`` command-line entry point.

Exit codes: 0 on success, 1 when ``verify`` finds the property false, 2 on
any error (a JSON error object goes to stderr).
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import properties as props
from .bounds import closed_form_bounds, upper_bound_certificate
from .constructions import ConstructionParams, build_cancellative, build_union_free
from .core import PackingRecord, dumps_hypergraph, loads_hypergraph
from .errors import HxError
from .packing import DEFAULT_PATIENCE, DIRECT, FAITHFUL, greedy_conflict_free_packing
from .search import KINDS, SearchProblem, brute_force_oracle, extremal_search

EXIT_OK, EXIT_FALSE, EXIT_ERROR = 0, 1, 2
PROPERTIES = ("cancellative", "union-free", "cover-free", "ve-free", "ell-minus", "induced-packing")
# flags that name files rather than configure the computation
_PATH_KEYS = {"out", "config", "file", "template", "manifest"}


class UsageError(HxError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--deterministic", action="store_true", default=argparse.SUPPRESS)
    g.add_argument("--threads", type=_positive, default=argparse.SUPPRESS)
    g.add_argument("--format", choices=("text", "json", "csv"), default=argparse.SUPPRESS)
    g.add_argument("--config", default=argparse.SUPPRESS, help="key=value file; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="hx", parents=[common], description="Extremal uniform hypergraph toolkit.")
    parser.add_argument("--version", action="version", version=f"hx {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("construct", parents=[common], help="run a lower-bound construction")
    p.add_argument("family", choices=("cancellative", "union-free"))
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--m0", type=int)
    group.add_argument("--epsilon", type=_fraction)
    p.add_argument("--c-hat", type=_fraction)
    p.add_argument("--strategy", choices=(DIRECT, FAITHFUL), default=DIRECT)
    p.add_argument("--budget", type=_positive, default=20_000, help="packing sample budget")
    p.add_argument("--patience", type=_positive, default=DEFAULT_PATIENCE,
                   help="stop packing after this many samples without an acceptance")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("verify", parents=[common], help="check a property of a hypergraph")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.add_argument("--t", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--e", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--max-unions", type=_positive)
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--out")
    p.add_argument("file")

    p = sub.add_parser("search", parents=[common], help="exact extremal number of a tiny instance")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    p.add_argument("--budget", type=_positive, help="node budget")
    p.add_argument("--time-budget", type=float)
    p.add_argument("--max-candidates", type=_positive, default=64)
    p.add_argument("--out")

    p = sub.add_parser("pack", parents=[common], help="greedy conflict-free packing of a template")
    p.add_argument("--template", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--strategy", choices=(DIRECT, FAITHFUL), default=DIRECT)
    p.add_argument("--epsilon", type=_fraction)
    p.add_argument("--budget", type=_positive, default=10_000)
    p.add_argument("--patience", type=_positive, default=DEFAULT_PATIENCE)
    p.add_argument("--target", type=_positive)
    p.add_argument("--out")

    p = sub.add_parser("bounds", parents=[common], help="exact bound table")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("certify", parents=[common], help="replay the counting upper bound")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--full-sigma", action="store_true", help="list the k-sets of every sigma(T)")
    p.add_argument("--out")
    p.add_argument("file")
    return parser


GLOBAL_DEFAULTS = {"seed": 0, "deterministic": False, "threads": None, "format": None}


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    # key=value files have no section header; give them one
    cp.read_string("[hx]\n" + Path(path).read_text())
    return {key.replace("-", "_"): value.strip().strip('"') for key, value in cp["hx"].items()}


def parse_args(argv) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        config = _read_config(known.config)
        # config values become defaults, so explicit flags still win
        for subparser in parser._subparsers._group_actions[0].choices.values():
            for action in subparser._actions:
                if action.option_strings and action.dest in config and action.dest != "config":
                    action.default = _coerce(action, config[action.dest])
                    action.required = False
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if args.threads is None:
        args.threads = int(os.environ.get("HX_THREADS", "1"))
    return args


def _coerce(action, text):
    if action.nargs == 0:
        return text.lower() in ("1", "true", "yes", "on")
    return action.type(text) if action.type else text


def _jsonable(value):
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def config_echo(args) -> dict:
    return {key: _jsonable(v) for key, v in sorted(vars(args).items()) if key not in _PATH_KEYS}


def config_digest(args) -> str:
    blob = json.dumps(config_echo(args), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _meta(args) -> dict:
    return {"tool": "hx", "version": __version__, "seed": args.seed, "config_digest": config_digest(args)}


def _meta_comments(args) -> list[str]:
    m = _meta(args)
    return [f"hx {m['version']} seed={m['seed']} config={m['config_digest']}"]


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Run:
    """Collects outputs of one invocation and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.start = time.perf_counter()
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []

    def elapsed_ms(self):
        if self.args.deterministic:
            return None
        return round((time.perf_counter() - self.start) * 1000, 3)

    def read_input(self, path) -> str:
        self.inputs[Path(path).name] = _file_digest(path)
        return Path(path).read_text()

    def write(self, path, text: str) -> None:
        Path(path).write_text(text)
        self.outputs.append(str(path))

    def manifest(self) -> dict:
        return {
            "meta": _meta(self.args),
            "config": config_echo(self.args),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": sorted(Path(p).name for p in self.outputs),
            "timings": {"total_ms": self.elapsed_ms()},
        }


def _emit(run: Run, payload: dict, text_lines=None) -> None:
    """Write ``payload`` to --out (plus a manifest) or print it."""
    fmt = run.args.format or "json"
    body = _dumps(payload) if fmt != "text" or text_lines is None else "\n".join(text_lines) + "\n"
    out = getattr(run.args, "out", None)
    if out:
        run.write(out, body)
        Path(str(out) + ".manifest.json").write_text(_dumps(run.manifest()))
    else:
        sys.stdout.write(body)


# ---------------------------------------------------------------- commands

def cmd_construct(args, run: Run) -> int:
    params = ConstructionParams(t=args.t, k=args.k, n=args.n, m0=args.m0, epsilon=args.epsilon,
                                seed=args.seed, strategy=args.strategy, packing_budget=args.budget,
                                packing_patience=args.patience, c_hat=args.c_hat)
    builder = build_cancellative if args.family == "cancellative" else build_union_free
    res = builder(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    comments = _meta_comments(args)
    for name, h in (("G.hg", res.G), ("F.hg", res.F), ("shadow.hg", res.shadow), ("H.hg", res.H)):
        run.write(out / name, dumps_hypergraph(h, comments=comments))
    packing = res.packing.to_dict()
    packing["meta"] = _meta(args)
    run.write(out / "packing.json", _dumps(packing))
    report = res.report.to_dict()
    report["meta"] = _meta(args)
    report["threads"] = args.threads
    report["elapsed_ms"] = run.elapsed_ms()
    run.write(out / "report.json", _dumps(_jsonable(report)))
    (out / "manifest.json").write_text(_dumps(run.manifest()))
    if (args.format or "json") == "text":
        print(f"H: {res.report.sizes['H']} edges, density ratio {res.report.density_ratio}, "
              f"{res.report.verification}")
    return EXIT_OK


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--property {args.property} requires {' '.join(missing)}")


def cmd_verify(args, run: Run) -> int:
    text = run.read_input(args.file)
    if args.property == "induced-packing":
        record = PackingRecord.from_dict(json.loads(text))
        w = props.is_induced_packing(record, args.k)
    else:
        h = loads_hypergraph(text, one_based=args.one_based)
        if args.property == "cancellative":
            _need(args, "t")
            w = props.is_t_cancellative(h, args.t)
        elif args.property == "cover-free":
            _need(args, "t")
            w = props.is_t_cover_free(h, args.t)
        elif args.property == "union-free":
            _need(args, "t")
            w = props.is_t_union_free(h, args.t, args.max_unions)
        elif args.property == "ve-free":
            _need(args, "v", "e")
            w = props.is_ve_free(h, args.v, args.e)
        else:
            _need(args, "k", "e")
            w = props.is_ell_minus_free_upto(h, args.k, args.e)
    payload = w.to_dict()
    payload["elapsed_ms"] = run.elapsed_ms()
    payload["meta"] = _meta(args)
    lines = [f"property: {w.property}", f"holds: {str(w.holds).lower()}"]
    if w.witness is not None:
        lines.append(f"witness: {list(w.witness)}")
    _emit(run, _jsonable(payload), lines)
    return EXIT_OK if w.holds else EXIT_FALSE


def cmd_search(args, run: Run) -> int:
    problem = SearchProblem(args.kind, args.t, args.n, args.r, node_budget=args.budget,
                            time_budget=args.time_budget, max_candidates=args.max_candidates)
    res = extremal_search(problem)
    payload = {
        "kind": args.kind,
        "params": {"t": args.t, "n": args.n, "r": args.r},
        "optimum": res.optimum,
        "status": res.status,
        "nodes": res.nodes,
        "witness": res.witness.edge_lists(),
        "witness_file": None,
        "elapsed_ms": None,
        "meta": _meta(args),
    }
    if args.oracle:
        payload["oracle"] = brute_force_oracle(problem)
        payload["oracle_agrees"] = payload["oracle"] == res.optimum
    if args.out:
        wpath = Path(args.out).with_suffix(".witness.hg")
        run.write(wpath, dumps_hypergraph(res.witness, comments=_meta_comments(args)))
        payload["witness_file"] = wpath.name
    payload["elapsed_ms"] = run.elapsed_ms()
    lines = [f"{args.kind} t={args.t} n={args.n} r={args.r}: optimum {res.optimum} ({res.status}, {res.nodes} nodes)"]
    _emit(run, payload, lines)
    if args.oracle and not payload["oracle_agrees"]:
        raise HxError(f"oracle disagrees: search {res.optimum}, oracle {payload['oracle']}")
    return EXIT_OK


def cmd_pack(args, run: Run) -> int:
    template = loads_hypergraph(run.read_input(args.template))
    record = greedy_conflict_free_packing(template, args.n, args.k, args.e, args.epsilon, args.strategy,
                                          seed=args.seed, target_count=args.target, budget=args.budget,
                                          patience=args.patience)
    payload = record.to_dict()
    payload["meta"] = _meta(args)
    payload["elapsed_ms"] = run.elapsed_ms()
    lines = [f"{len(record)} copies, density {payload['density'][0]}/{payload['density'][1]}"]
    _emit(run, payload, lines)
    return EXIT_OK


def cmd_bounds(args, run: Run) -> int:
    r = args.r if args.r is not None else (args.t * args.k if args.k is not None else None)
    if r is None:
        raise UsageError("bounds needs --r or --k")
    table = closed_form_bounds(args.t, r, args.n, args.k)
    fmt = args.format or "csv"
    meta = _meta(args)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# hx {meta['version']} seed={meta['seed']} config={meta['config_digest']}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "anchor", "numerator", "denominator", "note"])
        writer.writerows(row.as_csv() for row in table.rows)
        body = buf.getvalue()
    elif fmt == "json":
        body = _dumps({"t": args.t, "k": args.k, "r": r, "n": args.n, "meta": meta,
                       "rows": [dict(zip(("name", "anchor", "numerator", "denominator", "note"), row.as_csv()))
                                for row in table.rows]})
    else:
        body = "".join(f"{row.name:28} {'' if row.value is None else row.value!s:>24}  {row.note}\n"
                       for row in table.rows)
    if args.out:
        run.write(args.out, body)
        Path(str(args.out) + ".manifest.json").write_text(_dumps(run.manifest()))
    else:
        sys.stdout.write(body)
    return EXIT_OK


def cmd_certify(args, run: Run) -> int:
    h = loads_hypergraph(run.read_input(args.file), one_based=args.one_based)
    rep = upper_bound_certificate(h, args.t, args.k, full_sigma=args.full_sigma)
    payload = rep.to_dict()
    payload["meta"] = _meta(args)
    payload["elapsed_ms"] = run.elapsed_ms()
    lines = [f"{name}: {str(ok).lower()}" for name, ok in rep.verdicts.items()]
    _emit(run, payload, lines)
    return EXIT_OK


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "search": cmd_search,
            "pack": cmd_pack, "bounds": cmd_bounds, "certify": cmd_certify}


def _error(exc: BaseException) -> int:
    obj = {"error": type(exc).__name__, "message": str(exc)}
    line = getattr(exc, "line", None)
    if line is not None:
        obj["line"] = line
    sys.stderr.write(json.dumps(obj) + "\n")
    return EXIT_ERROR


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args, Run(args))
    except (HxError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        return _error(exc)


if __name__ == "__main__":
    sys.exit(main())
