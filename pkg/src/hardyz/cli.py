"""Command line front end: ``hardyz <command> [options]``.

Commands
--------
z-eval        Z(t) by the oracle, Riemann-Siegel or the smoothed k = 1 sum
theta         theta(t) from log-gamma against the asymptotic series
afe-check     smoothed sum against the oracle at seeded random heights
saddle-check  window quadrature against the saddle lemma for seeded random (n, T)
integrate     int_T^{2T} Z by both routes, with the five range totals
scan          int_0^T Z on a geometric grid
sum-demo      sum_{k1 < n <= k2} (-1)^n sqrt(n) against 2 sqrt(k1)

Every command accepts ``--format csv|json``, ``--out PATH`` and
``--config FILE`` (a JSON object keyed by option name; explicit flags win).
Exit status: 0 success, 1 invalid input or domain error, 2 evaluation budget
exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from functools import partial

import numpy as np

from hardyz.errors import BudgetExceededError
from hardyz.primitive import (
    DEFAULT_EPSILON,
    _map,
    alternating_sqrt_sum,
    integrate_z_afe,
    primitive_scan,
    saddle_check,
)
from hardyz.smoothing import make_kernel
from hardyz.special_fns import (
    afe_error_bound,
    afe_z_k1,
    hardy_z,
    rs_theta,
    theta_loggamma,
)

EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2
WORKERS_ENV = "HARDYZ_WORKERS"

Z_COLUMNS = ("t", "value", "method", "err_est")
THETA_COLUMNS = ("t", "theta", "theta_series", "difference")
AFE_COLUMNS = ("t", "value_afe", "value_oracle", "difference", "bound", "ok")
SADDLE_COLUMNS = ("n", "T", "a", "b", "quad_re", "quad_im", "main_re", "main_im",
                  "discrepancy", "budget", "ok")
RECORD_COLUMNS = ("T", "epsilon", "value_direct", "value_afe", "discrepancy",
                  "afe_error_budget", "normalized", "sum_contributions")
SCAN_COLUMNS = ("T", "value_direct", "value_afe", "normalized", "budget")
SUM_COLUMNS = ("k1", "k2", "value", "bound", "ok")
LIST_SEP = ";"


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if isinstance(v, (list, tuple)):
        return LIST_SEP.join(_fmt(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def render(records, fmt: str, columns) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_fmt(r[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        rows = [{c: _jsonable(r[c]) for c in columns} for r in records]
        return json.dumps(rows, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(records, fmt: str = "csv", path=None, columns=None) -> None:
    """Write row dicts as CSV or JSON, to ``path`` atomically or to stdout.

    ``columns`` defaults to the keys of the first record; it must be given
    for an empty list to get a header.
    """
    records = list(records)
    if columns is None:
        columns = tuple(records[0]) if records else ()
    text = render(records, fmt, columns)
    if path is None:
        sys.stdout.write(text)
        return
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hardyz-", suffix=".tmp")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        if isinstance(exc, OSError):
            raise OSError(f"cannot write {path}: {exc}") from exc
        raise


def _parse_cell(s: str):
    if s in ("true", "false"):
        return s == "true"
    if LIST_SEP in s:
        return [_parse_cell(x) for x in s.split(LIST_SEP)]
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def read_records(path, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`emit`."""
    with open(path, newline="") as fh:
        if fmt == "json":
            return json.load(fh)
        return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def record_row(rec) -> dict:
    return {"T": rec.T, "epsilon": rec.epsilon, "value_direct": rec.value_direct,
            "value_afe": rec.value_afe, "discrepancy": rec.discrepancy,
            "afe_error_budget": rec.afe_error_budget, "normalized": rec.normalized,
            "sum_contributions": list(rec.sum_contributions)}


def scan_row(rec) -> dict:
    return {"T": rec.T, "value_direct": rec.value_direct, "value_afe": rec.value_afe,
            "normalized": rec.normalized, "budget": rec.afe_error_budget}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_z_eval(args):
    kernel = make_kernel(args.b)
    rows = []
    for t in args.t:
        s = hardy_z(t, args.method, kernel=kernel, num_corrections=args.corrections)
        rows.append({"t": s.t, "value": s.value, "method": s.method.value, "err_est": s.err_est})
    return rows, Z_COLUMNS, EXIT_OK


def _cmd_theta(args):
    rows = []
    for t in args.t:
        a = float(theta_loggamma(t))
        b = float(rs_theta(t))
        rows.append({"t": t, "theta": a, "theta_series": b, "difference": a - b})
    return rows, THETA_COLUMNS, EXIT_OK


def _afe_row(t, b):
    kernel = make_kernel(b)
    v = afe_z_k1(t, kernel).value
    o = hardy_z(t, "oracle").value
    bound = afe_error_bound(t)
    return {"t": t, "value_afe": v, "value_oracle": o, "difference": abs(v - o),
            "bound": bound, "ok": abs(v - o) <= bound}


def _cmd_afe_check(args):
    if not 2 * math.pi <= args.tmin < args.tmax:
        raise ValueError("afe-check needs 2*pi <= --tmin < --tmax")
    rng = np.random.default_rng(args.seed)
    ts = np.exp(rng.uniform(math.log(args.tmin), math.log(args.tmax), args.samples))
    rows = _map(partial(_afe_row, b=args.b), [float(t) for t in ts], args.workers)
    return rows, AFE_COLUMNS, EXIT_OK if all(r["ok"] for r in rows) else EXIT_DOMAIN


def random_saddle_pairs(count: int, seed: int, tmin: float, tmax: float) -> list[tuple[int, float]]:
    """(n, T) with c_n = 2 pi n^2 strictly inside [T, 2T] and T in [tmin, tmax]."""
    rng = np.random.default_rng(seed)
    n_lo = math.ceil(math.sqrt(tmin / math.pi) + 1e-9)
    n_hi = math.floor(math.sqrt(tmax / (2 * math.pi)))
    if n_hi < n_lo:
        raise ValueError(f"no n with 2 pi n^2 inside [T, 2T] for T in [{tmin:g}, {tmax:g}]")
    pairs = []
    for _ in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        c = 2 * math.pi * n * n
        lo, hi = max(tmin, c / 2), min(tmax, c)
        pairs.append((n, float(rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo)))))
    return pairs


def _saddle_row(pair, b, epsilon, window):
    n, T = pair
    quad, lemma, (a, bb) = saddle_check(n, T, make_kernel(b), epsilon, window)
    d = abs(quad.value - lemma.main_term)
    return {"n": n, "T": T, "a": a, "b": bb, "quad_re": quad.value.real, "quad_im": quad.value.imag,
            "main_re": lemma.main_term.real, "main_im": lemma.main_term.imag,
            "discrepancy": d, "budget": lemma.budget, "ok": d <= lemma.budget}


def _cmd_saddle_check(args):
    pairs = random_saddle_pairs(args.pairs, args.seed, args.tmin, args.tmax)
    rows = _map(partial(_saddle_row, b=args.b, epsilon=args.epsilon, window=args.window),
                pairs, args.workers)
    return rows, SADDLE_COLUMNS, EXIT_OK if all(r["ok"] for r in rows) else EXIT_DOMAIN


def _cmd_integrate(args):
    rec = integrate_z_afe(args.T, make_kernel(args.b), args.epsilon, window=args.window,
                          workers=args.workers)
    return [record_row(rec)], RECORD_COLUMNS, EXIT_OK


def _cmd_scan(args):
    scan = primitive_scan(args.tmax, args.grid, make_kernel(args.b), args.epsilon,
                          T_min=args.tmin, workers=args.workers, with_afe=args.with_afe)
    return [scan_row(r) for r in scan.grid], SCAN_COLUMNS, EXIT_OK


def _cmd_sum_demo(args):
    value = alternating_sqrt_sum(args.k1, args.k2)
    bound = 2.0 * math.sqrt(args.k1)
    return [{"k1": args.k1, "k2": args.k2, "value": value, "bound": bound,
             "ok": abs(value) <= bound}], SUM_COLUMNS, EXIT_OK


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        return _positive_int(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not a positive integer") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--config", default=None, help="JSON file of option defaults")
    common.add_argument("--workers", type=_positive_int, default=None,
                        help=f"process count (default: ${WORKERS_ENV} or 1)")
    common.add_argument("--b", type=float, default=2.0, help="kernel plateau parameter, 1 < b <= 2")

    parser = _Parser(prog="hardyz", description="Hardy's Z function and its integral.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("z-eval", parents=[common], help="evaluate Z(t)")
    p.add_argument("--t", type=float, action="append", required=True)
    p.add_argument("--method", default="oracle", help="oracle, rs or afe")
    p.add_argument("--corrections", type=int, default=5, help="Riemann-Siegel remainder terms, 0..5")
    p.set_defaults(handler=_cmd_z_eval)

    p = sub.add_parser("theta", parents=[common], help="evaluate theta(t)")
    p.add_argument("--t", type=float, action="append", required=True)
    p.set_defaults(handler=_cmd_theta)

    p = sub.add_parser("afe-check", parents=[common], help="smoothed sum against the oracle")
    p.add_argument("--samples", type=_positive_int, default=20)
    p.add_argument("--tmin", type=float, default=100.0)
    p.add_argument("--tmax", type=float, default=1e5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_afe_check)

    p = sub.add_parser("saddle-check", parents=[common], help="saddle lemma on random (n, T)")
    p.add_argument("--pairs", type=_positive_int, default=20)
    p.add_argument("--tmin", type=float, default=1e3)
    p.add_argument("--tmax", type=float, default=1e5)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--window", choices=("wide", "narrow"), default="wide")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_saddle_check)

    p = sub.add_parser("integrate", parents=[common], help="int_T^{2T} Z by both routes")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--window", choices=("wide", "narrow"), default="wide")
    p.set_defaults(handler=_cmd_integrate)

    p = sub.add_parser("scan", parents=[common], help="int_0^T Z on a geometric grid")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tmin", type=float, default=100.0)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--with-afe", action="store_true")
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("sum-demo", parents=[common], help="alternating square-root sum")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.set_defaults(handler=_cmd_sum_demo)
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _apply_config(sub: argparse.ArgumentParser, config: dict, path: str) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config", "handler"):
            raise ConfigError(f"{path}: field {key!r}: not an option of {sub.prog}")
        try:
            if isinstance(action, argparse._AppendAction):
                value = [action.type(v) if action.type else v
                         for v in (value if isinstance(value, list) else [value])]
            elif action.type is not None and value is not None:
                value = action.type(value)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}: field {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"{path}: field {key!r}: {value!r} not in {list(action.choices)}")
        defaults[dest] = value
        action.required = False
    sub.set_defaults(**defaults)


def parse_args(argv=None) -> argparse.Namespace:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        config = _load_config(known.config)
        commands = parser._subparsers._group_actions[0].choices
        name = next((a for a in argv if a in commands), None)
        if name is not None:
            _apply_config(commands[name], config, known.config)
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = _default_workers()
    return args


def run(args: argparse.Namespace) -> int:
    rows, columns, status = args.handler(args)
    emit(rows, args.format, args.out, columns)
    return status


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return run(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"hardyz: config error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExceededError as exc:
        print(f"hardyz: evaluation budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OverflowError, OSError) as exc:
        print(f"hardyz: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
