"""Command line: parse, eliminate, decide, eval and check.

Exit codes: 0 success or true, 1 false, 2 bad input (syntax, config, model),
3 resource limit, 4 unbound constant, 5 failed check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import EngineConfig
from .errors import (
    ConfigError,
    EngineError,
    FormulaSyntaxError,
    ResourceLimit,
    UnboundConstant,
    UnboundVariable,
)
from .formulas import is_quantifier_free, parse, print_formula, to_json

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_LIMIT, EXIT_UNBOUND, EXIT_CHECK = 0, 1, 2, 3, 4, 5


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def parse_bounds(text: Optional[str]) -> dict:
    out: dict[str, int] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"bad bound {item!r}; expected K=V")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise ConfigError(f"bound {k.strip()!r} needs an integer value") from None
    return out


def _formula_text(arg: str) -> str:
    return sys.stdin.read().strip() if arg == "-" else arg


def _load_model(path: Optional[str], cfg: EngineConfig):
    if path is None:
        return None
    from .sandbox import load_model

    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read model {path}: {e}") from e
    return load_model(data, cfg)


def cmd_parse(args, cfg: EngineConfig) -> int:
    f = parse(_formula_text(args.formula), cfg)
    if args.json:
        _emit(to_json(f))
    else:
        print(print_formula(f))
    return EXIT_OK


def cmd_eliminate(args, cfg: EngineConfig) -> int:
    from .qe import eliminate_all

    f = parse(_formula_text(args.formula), cfg)
    res, trace = eliminate_all(f, cfg)
    if args.json:
        out = {"input": print_formula(f), "output": print_formula(res)}
        if args.trace:
            out["trace"] = trace.to_json()
        _emit(out)
        return EXIT_OK
    print(print_formula(res))
    if args.trace:
        print("--- trace ---")
        print(trace.dumps())
    return EXIT_OK


def cmd_decide(args, cfg: EngineConfig) -> int:
    from .qe import decide_sentence

    f = parse(_formula_text(args.formula), cfg)
    model = _load_model(args.model, cfg)
    value, trace = decide_sentence(f, cfg, model)
    if args.json:
        out = {"input": print_formula(f), "value": value}
        if args.trace:
            out["trace"] = trace.to_json()
        _emit(out)
    else:
        print("true" if value else "false")
        if args.trace:
            print("--- trace ---")
            print(trace.dumps())
    return EXIT_OK if value else EXIT_FALSE


def cmd_eval(args, cfg: EngineConfig) -> int:
    from .sandbox import eval_qfree

    f = parse(_formula_text(args.formula), cfg)
    if not is_quantifier_free(f):
        raise ConfigError("eval takes a quantifier-free formula; use decide for quantified ones")
    model = _load_model(args.model, cfg)
    if model is None:
        from .sandbox import new_model

        model = new_model(cfg)
    value = eval_qfree(f, {}, model)
    if args.json:
        _emit({"input": print_formula(f), "value": value})
    else:
        print("true" if value else "false")
    return EXIT_OK if value else EXIT_FALSE


def cmd_check(args, cfg: EngineConfig) -> int:
    from .suites import run_suite

    bounds = parse_bounds(args.bounds)
    try:
        result = run_suite(args.suite, cfg, bounds)
    except ValueError as e:
        if isinstance(e, EngineError):
            raise
        raise ConfigError(str(e)) from e
    if args.json:
        _emit(result.to_json())
    else:
        print(f"suite {result.suite}: {'ok' if result.ok else 'FAILED'}")
        print(f"passed {result.passed}  failed {result.failed}")
        for k, v in result.counts.items():
            print(f"  {k}: {v}")
        for note in result.notes:
            print(f"  note: {note}")
        if result.counterexample is not None:
            print("first counterexample: " + json.dumps(result.counterexample, sort_keys=True))
    if args.report_dir:
        jpath, ppath = _write_report(result, args.report_dir, cfg, bounds)
        if not args.json:
            print(f"report: {jpath} {ppath}")
    return EXIT_OK if result.ok else EXIT_CHECK


def _write_report(result, outdir, cfg, bounds):
    from .report import write_report

    return write_report(result, outdir, cfg.describe(), bounds)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="genericsub", description="Quantifier elimination for generic vector-space expansions.")
    ap.add_argument("--config", metavar="PATH", help="key=value configuration file (field, ring, ordered, limits.*)")
    sub = ap.add_subparsers(dest="command", required=True)

    def formula_cmd(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("formula", help="formula text, or - to read stdin")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    formula_cmd("parse", "print the normalized formula")
    p = formula_cmd("eliminate", "quantifier-free equivalent")
    p.add_argument("--trace", action="store_true", help="also print the elimination trace")
    p = formula_cmd("decide", "truth value of a sentence (exit 0 true, 1 false)")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--model", metavar="PATH", help="sandbox snapshot binding the free constants")
    p = formula_cmd("eval", "evaluate a quantifier-free formula in a sandbox model")
    p.add_argument("--model", metavar="PATH")

    c = sub.add_parser("check", help="run a property suite")
    from .suites import SUITES

    c.add_argument("--suite", required=True, choices=SUITES)
    c.add_argument("--bounds", metavar="K=V,...", help="suite bounds such as samples=2000,seed=1")
    c.add_argument("--report-dir", metavar="DIR", help="write <suite>.json and <suite>.png here")
    c.add_argument("--json", action="store_true")
    return ap


COMMANDS = {"parse": cmd_parse, "eliminate": cmd_eliminate, "decide": cmd_decide, "eval": cmd_eval, "check": cmd_check}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = EngineConfig.load(args.config) if args.config else EngineConfig()
        return COMMANDS[args.command](args, cfg)
    except FormulaSyntaxError as e:
        print(e.diagnostic(), file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (UnboundConstant, UnboundVariable) as e:
        print(f"unbound: {e}", file=sys.stderr)
        return EXIT_UNBOUND
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
