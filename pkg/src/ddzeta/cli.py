"""ddzeta command line.

Exit codes: 0 success, 1 an identity failed, 2 bad input or precondition,
3 singular point, 4 zero table missing or unreadable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .arith_fn import RegionError, direct_phi2
from .continuation import EvalParams, SingularityError, complex_json, eval_phi2
from .exact_core import SUITES, rational_str, residue_R, run_suite
from .limits import (LadderError, SingularCollisionError, default_ladder,
                     fit_singular_expansion, residue_closed_mu)
from .series import SeriesKind, SeriesSpec
from .special_fn import PrecisionContext
from .zeta_zeros import (PrecisionWarning, ZeroSumPolicy, ZeroTableError,
                         default_zeros_path, load_zeros, validate_zeros)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR, EXIT_ZEROS = 0, 1, 2, 3, 4
DEFAULT_CONFIG = "ddzeta.conf"


class UsageError(Exception):
    pass


class ZerosMissing(Exception):
    pass


@dataclass
class RunConfig:
    precision_decimal: int = 80
    zeros_file: str | None = None
    N: int = 4
    eta: str = "1/7"
    T: str = "auto"
    max_zeros: int = 100
    output: str | None = None  # None: per-command default

    def validate(self):
        if self.precision_decimal < 30:
            raise UsageError("precision must be >= 30")
        if self.N < 2:
            raise UsageError("N must be >= 2")
        if self.max_zeros < 0:
            raise UsageError("max_zeros must be >= 0")
        if self.output not in (None, "json", "csv", "text"):
            raise UsageError(f"unknown output format {self.output!r}")
        try:
            eta = Fraction(self.eta)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad eta {self.eta!r}") from None
        if not 0 < eta < 1:
            raise UsageError("eta must lie in (0, 1)")
        if self.T != "auto":
            try:
                float(self.T)
            except ValueError:
                raise UsageError(f"bad T {self.T!r}") from None


_ALIASES = {"precision": "precision_decimal", "zeros-file": "zeros_file", "max-zeros": "max_zeros"}


def read_config(path: Path) -> dict:
    """``key = value`` lines; '#' starts a comment."""
    out = {}
    types = {f.name: f.type for f in fields(RunConfig)}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        key = _ALIASES.get(key, key.replace("-", "_"))
        if key not in types:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("precision_decimal", "N", "max_zeros"):
            try:
                out[key] = int(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} must be an integer") from None
        else:
            out[key] = value
    return out


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    path = Path(args.config) if args.config else Path(DEFAULT_CONFIG)
    if args.config and not path.is_file():
        raise UsageError(f"config file {path} not found")
    if path.is_file():
        for k, v in read_config(path).items():
            setattr(cfg, k, v)
    for name in ("precision_decimal", "zeros_file", "N", "eta", "T", "max_zeros", "output"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    cfg.validate()
    return cfg


def parse_complex(text: str):
    """'RE' or 'RE,IM' decimal literal at the current precision."""
    parts = text.split(",")
    if len(parts) > 2 or not all(p.strip() for p in parts):
        raise UsageError(f"malformed complex literal {text!r}")
    try:
        vals = [mpmath.mpf(p.strip()) for p in parts]
    except (ValueError, TypeError):
        raise UsageError(f"malformed complex literal {text!r}") from None
    if not all(mpmath.isfinite(v) for v in vals):
        raise UsageError(f"malformed complex literal {text!r}")
    return mpmath.mpc(*vals) if len(vals) == 2 else mpmath.mpc(vals[0])


def _series(text: str) -> SeriesSpec:
    try:
        return SeriesSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _ctx(cfg: RunConfig) -> PrecisionContext:
    return PrecisionContext(target_decimal=cfg.precision_decimal)


def _zero_table(cfg: RunConfig, ctx: PrecisionContext):
    path = Path(cfg.zeros_file) if cfg.zeros_file else default_zeros_path()
    if not path.is_file():
        raise ZerosMissing(f"zero table {path} not found")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)
            return load_zeros(path, ctx)
    except ZeroTableError as exc:
        raise ZerosMissing(str(exc)) from None


def _params(cfg: RunConfig) -> EvalParams:
    ctx = _ctx(cfg)
    table = _zero_table(cfg, ctx)
    if cfg.max_zeros > table.count:
        raise UsageError(f"max_zeros={cfg.max_zeros} exceeds the {table.count} zeros in the table")
    T = None if cfg.T == "auto" else float(cfg.T)
    return EvalParams(N=cfg.N, eta=Fraction(cfg.eta), T=T, ctx=ctx, zeros=table,
                      zero_policy=ZeroSumPolicy(max_zeros=cfg.max_zeros))


# --- output ------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def emit(payload, fmt: str, out=None, rows: list | None = None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows is not None:
            w.writerow(["case", "inputs", "expected", "actual", "status"])
            for r in rows:
                w.writerow([r["case"], r["inputs"], r["expected"], r["actual"], r["status"]])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(payload):
                w.writerow([k, v])
        out.write(buf.getvalue())
    else:
        for k, v in _flatten(payload):
            out.write(f"{k}: {v}\n")


# --- subcommands ---------------------------------------------------------------

def _fmt(cfg: RunConfig) -> str:
    return cfg.output or "json"


def cmd_residue(args, cfg: RunConfig) -> int:
    series = _series(args.series)
    if series.kind is SeriesKind.LAMBDA:
        try:
            r = residue_R(args.m, args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        value = rational_str(r)
    else:
        ctx = _ctx(cfg)
        with ctx.working():
            try:
                v = residue_closed_mu(args.m, args.n)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            value = mpmath.nstr(v, cfg.precision_decimal)
    if (cfg.output or "text") == "text":
        print(value)
    else:
        emit({"m": args.m, "n": args.n, "series": series.label, "residue": value}, cfg.output)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    if not 0 <= args.max <= 100:
        raise UsageError("--max must lie in 0..100")
    rows = run_suite(args.suite, args.max)
    failed = [r for r in rows if r["status"] != "pass"]
    summary = {"suite": args.suite, "max": args.max, "cases": len(rows),
               "failures": len(failed)}
    if failed:
        summary["first_failure"] = failed[0]
    if cfg.output == "csv":
        emit(summary, "csv", rows=rows)
    else:
        emit(summary, cfg.output or "text")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    series = _series(args.series)
    p = _params(cfg)
    with p.ctx.working():
        s1, s2 = parse_complex(args.s1), parse_complex(args.s2)
        try:
            res = eval_phi2(s1, s2, series, p)
        except SingularityError as exc:
            emit({"error": "singular", "series": series.label,
                  "s1": complex_json(s1, 30), "s2": complex_json(s2, 30),
                  "matches": exc.matches}, _fmt(cfg) if _fmt(cfg) != "text" else "json")
            return EXIT_SINGULAR
        emit(res.to_json(cfg.precision_decimal), _fmt(cfg))
    return EXIT_OK


def cmd_oracle(args, cfg: RunConfig) -> int:
    series = _series(args.series)
    s1, s2 = parse_complex(args.s1), parse_complex(args.s2)
    try:
        value, tail = direct_phi2(complex(s1), complex(s2), series, args.cutoff)
    except (RegionError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    except MemoryError as exc:
        raise UsageError(str(exc)) from None
    emit({"series": series.label, "cutoff": args.cutoff,
          "value": {"re": repr(value.real), "im": repr(value.imag)},
          "tail_estimate": repr(float(tail.value)), "tail_is_rigorous": tail.is_rigorous},
         _fmt(cfg))
    return EXIT_OK


def cmd_fit(args, cfg: RunConfig) -> int:
    series = _series(args.series)
    p = _params(cfg)
    with p.ctx.working():
        try:
            start = Fraction(args.ladder_start)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad ladder start {args.ladder_start!r}") from None
        try:
            ladder = default_ladder(start, args.ladder_len)
            fit = fit_singular_expansion(args.m, args.n, series, ladder, p)
        except LadderError as exc:
            raise UsageError(str(exc)) from None
        except SingularCollisionError as exc:
            emit({"error": "singular", "eps": mpmath.nstr(exc.eps, 20), "matches": exc.matches},
                 _fmt(cfg) if _fmt(cfg) != "text" else "json")
            return EXIT_SINGULAR
        emit(fit.to_json(min(cfg.precision_decimal, 40)), _fmt(cfg))
    return EXIT_OK


def cmd_zeros(args, cfg: RunConfig) -> int:
    ctx = _ctx(cfg)
    if args.import_path:
        path = Path(args.import_path)
        if not path.is_file():
            raise ZerosMissing(f"zero table {path} not found")
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", PrecisionWarning)
                table = load_zeros(path, ctx)
        except ZeroTableError as exc:
            raise UsageError(str(exc)) from None
        payload = {"source": str(path), "count": table.count,
                   "source_digits": table.source_digits,
                   "first": mpmath.nstr(table.gammas[0], 30),
                   "last": mpmath.nstr(table.gammas[-1], 30),
                   "warnings": [str(w.message) for w in caught]}
        emit(payload, _fmt(cfg))
        return EXIT_OK
    table = _zero_table(cfg, ctx)
    if not 0 <= args.validate <= table.count:
        raise UsageError(f"--validate must lie in 0..{table.count}")
    report = validate_zeros(table, args.validate, raise_on_failure=False)
    emit({"source": table.source, **report}, _fmt(cfg))
    return EXIT_FAIL if report["offending"] else EXIT_OK


# --- parser ------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help=f"key = value file (default ./{DEFAULT_CONFIG} if present)")
    p.add_argument("--precision", dest="precision_decimal", type=int, help="decimal digits (default 80)")
    p.add_argument("--zeros-file", dest="zeros_file", help="zero ordinates, one per line")
    p.add_argument("--N", type=int, help="k-sum truncation / contour abscissa (default 4)")
    p.add_argument("--eta", help="contour offset in (0,1) (default 1/7)")
    p.add_argument("--T", help="contour half-height or 'auto'")
    p.add_argument("--max-zeros", dest="max_zeros", type=int, help="zero count cap (default 100)")
    p.add_argument("--output", choices=("json", "csv", "text"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ddzeta", description="Double Dirichlet series with Λ and μ.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("residue", help="residue at (-m, -n)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--series", default="lambda")
    p.set_defaults(func=cmd_residue)

    p = sub.add_parser("verify", help="exact identity suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--max", type=int, default=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="evaluate the continuation")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--series", default="lambda")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="direct double sum in the convergence region")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--series", default="lambda")
    p.add_argument("--cutoff", type=int, default=10 ** 5)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit", help="fit c2/eps^2 + c1/eps + c0 at (-m, -n+eps)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--series", default="lambda")
    p.add_argument("--ladder-start", default="1/1000")
    p.add_argument("--ladder-len", type=int, default=8)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("zeros", help="import or validate a zero table")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--import", dest="import_path", metavar="PATH")
    g.add_argument("--validate", type=int, metavar="K")
    p.set_defaults(func=cmd_zeros)

    for p in sub.choices.values():
        _common(p)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        with mpmath.workdps(cfg.precision_decimal + 20):
            return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZerosMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZEROS


if __name__ == "__main__":
    sys.exit(main())
