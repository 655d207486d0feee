"""Command-line entry point: ``nlgf game|strategy|suite ...``.

Structured results are JSON on stdout (or ``--out``); sample streams are
newline-delimited JSON.  Errors are JSON documents on stderr.

Exit codes: 0 pass, 1 check failure or invalid input, 2 usage, 3 capacity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

STRATEGIES = ("magic-square", "pauli-basis", "zero", "ldt")
VALUE_MODES = ("classical", "quantum-lb", "strategy")
OPS = ("oracularize", "anchor", "repeat", "detype", "introspect")


class UsageError(Exception):
    pass


def _default(o: Any):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _dump(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, default=_default)


def _emit(args, text: str) -> None:
    if not text.endswith("\n") and text:
        text += "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_doc(args) -> dict:
    path = getattr(args, "inp", None)
    try:
        if path and path != "-":
            with open(path, encoding="utf-8") as fh:
                raw = fh.read()
        else:
            raw = sys.stdin.read()
    except OSError as e:
        raise UsageError(f"cannot read input: {e}") from e
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise UsageError(f"input is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise UsageError("input must be a JSON object")
    return doc


def _params(items: list[str] | None) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"--param expects key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _game_doc(doc: dict) -> dict:
    """Accept a bare game document or one wrapped by a strategy document."""
    return doc["game"] if "format" in doc and "game" in doc else doc


# -- game ------------------------------------------------------------------------------

def cmd_game(args) -> int:
    from . import gamecore as gc
    from . import solvers

    if args.action == "build":
        G = gc.build_game(args.name, **_params(args.param))
        _emit(args, _dump(G.to_dict()))
        return EXIT_OK

    G = gc.game_from_dict(_game_doc(_read_doc(args)))
    if args.action == "transform":
        if args.op == "repeat":
            H = gc.repeat(G, args.r)
        elif args.op == "introspect":
            H = gc.introspection_game(G, args.cap)
        else:
            H = gc.TRANSFORMS[args.op](G)
        _emit(args, _dump(H.to_dict()))
        return EXIT_OK

    if args.action == "sample":
        if args.n < 0:
            raise UsageError("--n must be non-negative")
        lines = [_dump({"i": i, "x": gc._enc(x), "y": gc._enc(y)})
                 for i, (x, y) in enumerate(G.sample(args.n, args.seed))]
        _emit(args, "\n".join(lines))
        return EXIT_OK

    if args.action == "enumerate":
        rows = [[gc._enc(x), gc._enc(y), str(p)] for x, y, p in G.pairs()]
        _emit(args, _dump({"game": G.name, "fingerprint": G.fingerprint(), "pairs": rows}))
        return EXIT_OK

    # value
    if args.mode == "classical":
        rep = solvers.classical_value_exact(G)
        wit = {s: [[gc._enc(q), gc._enc(a)] for q, a in rep.witness[s].items()] for s in ("A", "B")}
        out = {"mode": "classical", "game": G.name, "value": str(rep.value), "float": float(rep.value),
               "witness": wit, "work": rep.work}
    elif args.mode == "quantum-lb":
        rep = solvers.quantum_lower_bound(G, args.dim, iters=args.iters, seed=args.seed, restarts=args.restarts)
        out = {"mode": "quantum-lb", "game": G.name, "value": rep.value, "dim": args.dim,
               "restarts": args.restarts, "seed": args.seed, "work": rep.work}
    else:
        from . import quantlab as ql
        if not args.strategy:
            raise UsageError("--mode strategy needs --strategy FILE")
        with open(args.strategy, encoding="utf-8") as fh:
            S = ql.Strategy.from_dict(json.load(fh))
        out = {"mode": "strategy", "game": G.name, "value": ql.eval_value(G, S)}
    _emit(args, _dump(out))
    return EXIT_OK


# -- strategy --------------------------------------------------------------------------

def _build_strategy(name: str, params: dict, seed: int):
    from . import gamecore as gc
    from . import quantlab as ql

    if name == "magic-square":
        return gc.magic_square_game(), ql.magic_square_strategy()
    if name == "pauli-basis":
        n = int(params.get("n", 1))
        return gc.pauli_basis_game(n), ql.pauli_basis_strategy(n)
    if name == "zero":
        game = params.get("game", "accept")
        return gc.build_game(game), ql.trivial_strategy(lambda q: 0, "zero")
    if name == "ldt":
        from . import gf2p
        from .polylab import IdPoly
        from .rng import make_rng
        p, m, d = int(params.get("p", 1)), int(params.get("m", 2)), int(params.get("d", 1))
        f = IdPoly.random(gf2p.build_field(p), m, d, make_rng(seed))
        return gc.qlowdeg_game(p, m, d), ql.ldt_classical_strategy(f)
    raise UsageError(f"unknown strategy {name!r}; known: {list(STRATEGIES)}")


def _load_game_for(args, sdoc: dict):
    from . import gamecore as gc
    if args.game:
        return gc.build_game(args.game, **_params(args.param))
    if args.game_file:
        with open(args.game_file, encoding="utf-8") as fh:
            return gc.game_from_dict(_game_doc(json.load(fh)))
    if "game" in sdoc:
        return gc.game_from_dict(sdoc["game"])
    raise UsageError("no game given: use --game NAME or --game-file FILE")


def cmd_strategy(args) -> int:
    from . import quantlab as ql

    if args.action == "build":
        G, S = _build_strategy(args.name, _params(args.param), args.seed)
        doc = S.to_dict(G.questions("A"), G.questions("B"))
        doc["game"] = G.to_dict()
        _emit(args, _dump(doc))
        return EXIT_OK

    sdoc = _read_doc(args)
    if sdoc.get("format") != "nlgf-strategy/1":
        raise UsageError("input is not a strategy document")
    S = ql.Strategy.from_dict(sdoc)
    G = _load_game_for(args, sdoc)
    if args.action == "eval":
        v = ql.eval_value(G, S)
        ds = ql.delta_sync(G, S) if G.synchronous else None
        _emit(args, _dump({"game": G.name, "value": v, "delta_sync": ds}))
        return EXIT_OK
    c = ql.max_commutator(S, G)
    ok = c <= args.tolerance
    _emit(args, _dump({"game": G.name, "max_commutator": c, "oracularizable": ok, "tol": args.tolerance}))
    return EXIT_OK if ok else EXIT_FAIL


# -- suite -----------------------------------------------------------------------------

def _table(checks, suite: str, seed: int) -> str:
    lines = [f"suite {suite} seed {seed}", f"{'id':>3}  {'status':6}  {'name':20}  measured | expected | tol"]
    for c in checks:
        d = c.to_dict(timing=False)
        lines.append(f"{c.id:>3}  {'PASS' if c.passed else 'FAIL':6}  {c.name:20}  "
                     f"{_dump(d['measured'])} | {_dump(d['expected'])} | {_dump(d['tol'])}")
    lines.append(f"result: {'PASS' if all(c.passed for c in checks) else 'FAIL'}")
    return "\n".join(lines)


def cmd_suite(args) -> int:
    from . import suite

    checks = suite.run_suite(args.suite, seed=args.seed, tol=args.tolerance)
    if args.format == "json":
        text = _dump({"suite": args.suite, "seed": args.seed,
                      "passed": all(c.passed for c in checks),
                      "checks": [c.to_dict(timing=args.timing) for c in checks]})
    else:
        text = _table(checks, args.suite, args.seed)
        if args.timing:
            text += "\n" + "\n".join(f"{c.id:>3}  {c.seconds:.3f}s (limit {c.limit_s:g}s)" for c in checks)
    _emit(args, text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# -- parser ----------------------------------------------------------------------------

def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--tolerance", type=float, default=1e-9, help="numeric tolerance (default 1e-9)")

    p = argparse.ArgumentParser(prog="nlgf", description="Non-local game toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("game", help="build, transform, sample, enumerate or solve games")
    gs = g.add_subparsers(dest="action", required=True)
    b = gs.add_parser("build", parents=[common])
    b.add_argument("name")
    b.add_argument("--param", action="append", metavar="KEY=VALUE")
    t = gs.add_parser("transform", parents=[common])
    t.add_argument("--op", choices=OPS, required=True)
    t.add_argument("--r", type=int, default=2, help="repetitions for --op repeat")
    t.add_argument("--cap", type=int, default=2, help="qubit cap for --op introspect")
    t.add_argument("--in", dest="inp")
    s = gs.add_parser("sample", parents=[common])
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--in", dest="inp")
    e = gs.add_parser("enumerate", parents=[common])
    e.add_argument("--in", dest="inp")
    v = gs.add_parser("value", parents=[common])
    v.add_argument("--mode", choices=VALUE_MODES, default="classical")
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--iters", type=int, default=10)
    v.add_argument("--restarts", type=int, default=1)
    v.add_argument("--strategy", default=None, help="strategy document for --mode strategy")
    v.add_argument("--in", dest="inp")

    st = sub.add_parser("strategy", help="build, evaluate or check strategies")
    ss = st.add_subparsers(dest="action", required=True)
    sb = ss.add_parser("build", parents=[common])
    sb.add_argument("name", choices=STRATEGIES)
    sb.add_argument("--param", action="append", metavar="KEY=VALUE")
    for act in ("eval", "check-oracularizable"):
        a = ss.add_parser(act, parents=[common])
        a.add_argument("--game", default=None, help="library game name")
        a.add_argument("--game-file", default=None)
        a.add_argument("--param", action="append", metavar="KEY=VALUE")
        a.add_argument("--in", dest="inp")

    su = sub.add_parser("suite", help="acceptance suites")
    sus = su.add_subparsers(dest="action", required=True)
    r = sus.add_parser("run", parents=[common])
    r.add_argument("--suite", choices=("field", "cl", "poly", "games", "quant", "all"), default="all")
    r.add_argument("--format", choices=("table", "json"), default="table")
    r.add_argument("--timing", action="store_true", help="append wall times (not reproducible)")
    return p


def _error(kind: str, msg: str, code: int) -> int:
    sys.stderr.write(_dump({"error": kind, "message": msg, "exit_code": code}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads is not None:
        if args.threads < 1:
            return _error("UsageError", "--threads must be positive", EXIT_USAGE)
        # must precede the first numpy import to reach the BLAS pools
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    from .errors import CapacityError, NlgfError

    handler = {"game": cmd_game, "strategy": cmd_strategy, "suite": cmd_suite}[args.cmd]
    try:
        return handler(args)
    except UsageError as e:
        return _error("UsageError", str(e), EXIT_USAGE)
    except CapacityError as e:
        return _error("CapacityError", str(e), EXIT_CAPACITY)
    except (NlgfError, KeyError, ValueError, TypeError) as e:
        return _error(type(e).__name__, str(e), EXIT_FAIL)
    except BrokenPipeError:
        # downstream reader closed early (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except OSError as e:
        return _error("OSError", str(e), EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


__all__ = ["main", "build_parser", "cmd_game", "cmd_strategy", "cmd_suite"]
