"""``qaw`` command line: evaluate, verify and list zeros.

    qaw eval p 3 --t 0.3,0.2,0.1,0.4 --x 0.25
    qaw eval Aq 1.5 --q 0.3
    qaw verify identities --digits 50 --no-timestamp
    qaw zeros --t 1,1,1 --n-range 1..20 --format csv

Exit codes: 0 success, 1 a check failed, 2 invalid configuration,
3 numeric failure (pole, divergence, truncation).
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import sys
from dataclasses import dataclass, field

from mpmath import mp

from . import families as fam
from . import measures as meas
from .errors import ConfigError, InvalidArgumentError, InvalidParametersError, NumericError
from .numctx import make_context
from .qseries import ramanujan_Aq, theta4
from .suites import (
    ASYMPTOTIC_REGIMES,
    DEFAULT_FINITE_T,
    DEFAULT_INFINITE_T,
    DEFAULT_Q,
    SUITES,
    SuiteConfig,
    run_suite,
)

EVAL_TARGETS = ("p", "V", "Vtilde", "weight", "Aq", "theta4")
FORMATS = ("json", "csv", "pretty")
DEFAULT_DIGITS = 50
# keys accepted in a --config file; command-line flags take precedence
CONFIG_KEYS = ("q", "t", "n", "n_range", "x", "s", "w", "regime", "digits", "format", "no_timestamp")


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    q: str | None = None
    t: list | None = None
    n: int | None = None
    n_range: tuple | None = None
    x: list | None = None
    s: str | None = None
    w: str | None = None
    regime: str | None = None
    digits: int = DEFAULT_DIGITS
    format: str = "json"
    out: str | None = None
    timestamp: bool = True
    extra: dict = field(default_factory=dict)

    def echo(self):
        """The configuration as it appears in reports (output path excluded)."""
        return {
            "command": self.command,
            "target": self.target,
            "q": self.q,
            "t": self.t,
            "n": self.n,
            "n_range": list(self.n_range) if self.n_range else None,
            "x": self.x,
            "s": self.s,
            "w": self.w,
            "regime": self.regime,
            "digits": self.digits,
            "format": self.format,
        }


# ---------------------------------------------------------------- formatting


def decimal_string(v, digits: int) -> str:
    """Decimal rendering with ``digits`` significant digits; integers print bare."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = mp.mpmathify(v)
    if isinstance(v, mp.mpc):
        if v.imag == 0:
            v = v.real
        else:
            re = decimal_string(v.real, digits)
            im = decimal_string(abs(v.imag), digits)
            return f"{re}{'-' if v.imag < 0 else '+'}{im}j"
    if mp.isinf(v) or mp.isnan(v):
        return str(v)
    if v == mp.nint(v) and abs(v) < mp.mpf(10) ** digits:
        return str(int(v))
    return mp.nstr(v, digits)


def _serial(obj, digits):
    if isinstance(obj, dict):
        return {k: _serial(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_serial(v, digits) for v in obj]
    if obj is None or isinstance(obj, (str, bool)):
        return obj
    return decimal_string(obj, digits)


def _emit(cfg: RunConfig, report: dict, csv_rows: list, csv_header: list):
    if cfg.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_header)
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        lines = [f"{report['suite']}"]
        for row in csv_rows:
            lines.append("  " + "  ".join(str(c) for c in row))
        if "error" in report:
            lines.append(f"  error: {report['error']['type']}: {report['error']['message']}")
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(cfg: RunConfig, suite: str):
    report = {"suite": suite, "checks": [], "config": cfg.echo()}
    if cfg.timestamp:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return report


# ------------------------------------------------------------------- parsing


def _split(text):
    return [p.strip() for p in str(text).split(",") if p.strip()]


def parse_n_range(text) -> tuple:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        a, b = text
    else:
        parts = str(text).split("..")
        if len(parts) != 2:
            raise InvalidArgumentError(f"--n-range expects A..B, got {text!r}")
        a, b = parts
    a, b = _int(a, "--n-range start"), _int(b, "--n-range end")
    if a < 0 or b < a:
        raise InvalidArgumentError(f"--n-range needs 0 <= A <= B, got {text!r}")
    return a, b


def _number(text, what):
    try:
        return mp.mpmathify(str(text).replace(" ", ""))
    except (ValueError, TypeError) as exc:
        raise InvalidArgumentError(f"cannot parse {what} value {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(prog="qaw", description="Arbitrary-precision q-polynomial toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with defaults for the options below")
        p.add_argument("--q", help="base, 0 < q < 1")
        p.add_argument("--t", help="comma-separated parameters (3 or 4)")
        p.add_argument("--n", type=int, help="degree")
        p.add_argument("--n-range", dest="n_range", help="degree range A..B")
        p.add_argument("--x", help="point or comma-separated points (complex as a+bj)")
        p.add_argument("--s", help="edge scaling parameter s")
        p.add_argument("--w", help="theta argument w")
        p.add_argument("--regime", choices=ASYMPTOTIC_REGIMES, help="restrict the asymptotics suite to one regime")
        p.add_argument("--digits", type=int, help=f"significant digits (default {DEFAULT_DIGITS})")
        p.add_argument("--format", choices=FORMATS, help="output format (default json)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--no-timestamp", dest="no_timestamp", action="store_true", default=None,
                       help="omit the timestamp so reports are byte-reproducible")

    p_eval = sub.add_parser("eval", help="evaluate a polynomial or special function")
    p_eval.add_argument("target", choices=EVAL_TARGETS)
    p_eval.add_argument("arg", nargs="?", help="degree for p/V/Vtilde, argument for Aq/theta4")
    common(p_eval)
    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITES + ("all",))
    common(p_verify)
    p_zeros = sub.add_parser("zeros", help="zeros of V_n and the largest-zero growth table")
    common(p_zeros)
    return parser


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidArgumentError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise InvalidArgumentError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _int(val, what):
    try:
        return int(val)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{what} must be an integer, got {val!r}") from exc


def resolve_config(args) -> RunConfig:
    """Merge the config file (if any) with the flags; flags win."""
    merged = _load_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    cfg = RunConfig(command=args.command)
    cfg.target = getattr(args, "target", None) or getattr(args, "suite", None)
    if merged.get("q") is not None:
        cfg.q = str(merged["q"])
    if merged.get("t") is not None:
        t = merged["t"]
        cfg.t = [str(v) for v in t] if isinstance(t, list) else _split(t)
        if len(cfg.t) not in (3, 4):
            raise InvalidParametersError(f"--t needs 3 or 4 parameters, got {len(cfg.t)}")
    if merged.get("n") is not None:
        cfg.n = _int(merged["n"], "--n")
        if cfg.n < 0:
            raise InvalidArgumentError("--n must be nonnegative")
    if merged.get("n_range") is not None:
        cfg.n_range = parse_n_range(merged["n_range"])
    if cfg.n is not None and cfg.n_range is not None:
        raise InvalidArgumentError("give either --n or --n-range, not both")
    if merged.get("x") is not None:
        x = merged["x"]
        cfg.x = [str(v) for v in x] if isinstance(x, list) else _split(x)
    for key in ("s", "w", "regime"):
        if merged.get(key) is not None:
            setattr(cfg, key, str(merged[key]))
    if cfg.regime is not None and cfg.regime not in ASYMPTOTIC_REGIMES:
        raise InvalidArgumentError(f"unknown regime {cfg.regime!r}")
    if merged.get("digits") is not None:
        cfg.digits = _int(merged["digits"], "--digits")
    if merged.get("format") is not None:
        if merged["format"] not in FORMATS:
            raise InvalidArgumentError(f"unknown format {merged['format']!r}")
        cfg.format = merged["format"]
    cfg.timestamp = not bool(merged.get("no_timestamp"))
    cfg.out = getattr(args, "out", None)
    cfg.extra["arg"] = getattr(args, "arg", None)
    return cfg


# ------------------------------------------------------------------ commands


def _degrees(cfg: RunConfig):
    if cfg.extra.get("arg") is not None:
        try:
            return [int(cfg.extra["arg"])]
        except ValueError as exc:
            raise InvalidArgumentError(f"degree must be an integer, got {cfg.extra['arg']!r}") from exc
    if cfg.n is not None:
        return [cfg.n]
    if cfg.n_range is not None:
        return list(range(cfg.n_range[0], cfg.n_range[1] + 1))
    raise InvalidArgumentError("a degree is required (positional, --n or --n-range)")


def _params(cfg: RunConfig, q, size):
    t = cfg.t or list(DEFAULT_FINITE_T if size == 4 else DEFAULT_INFINITE_T)
    if len(t) != size:
        raise InvalidParametersError(f"this target needs {size} parameters, got {len(t)}")
    vals = [_number(v, "--t") for v in t]
    if size == 4:
        return fam.FiniteFamilyParams(q, vals)
    return fam.InfiniteFamilyParams(q, vals)


def _points(cfg: RunConfig, fallback=None):
    raw = cfg.x
    if raw is None and fallback is not None:
        raw = [fallback]
    if not raw:
        raise InvalidArgumentError("an evaluation point is required (--x)")
    return [(r, _number(r, "--x")) for r in raw]


def cmd_eval(cfg: RunConfig):
    ctx = make_context(cfg.digits)
    report = _envelope(cfg, "eval")
    rows = []
    with ctx.activate():
        q = _number(cfg.q or DEFAULT_Q, "--q")
        target = cfg.target
        values = []
        if target in ("p", "V", "Vtilde"):
            params = _params(cfg, q, 4 if target == "p" else 3)
            for label, x in _points(cfg):
                for n in _degrees(cfg):
                    if n < 0:
                        raise InvalidArgumentError("degree must be nonnegative")
                    if target == "p":
                        v = fam.pn_recurrence(x, params, n)
                    elif target == "V":
                        v = fam.vn_recurrence(x, params, n)
                    else:
                        v = fam.vn_tilde(x, params, n)
                    values.append((target, n, label, v))
        elif target == "weight":
            size = len(cfg.t) if cfg.t else 4
            params = _params(cfg, q, size)
            w = meas.ContinuousWeight("normalized-w" if size == 4 else "infinite-family-w", params)
            if size == 4 and not w.normalizable:
                raise InvalidParametersError("the weight is not integrable for these parameters")
            for label, x in _points(cfg):
                values.append((target, None, label, meas.weight_eval(w, x, ctx)))
        elif target == "Aq":
            for label, z in _points(cfg, cfg.extra.get("arg")):
                values.append((target, None, label, ramanujan_Aq(z, q, ctx)))
        elif target == "theta4":
            raw = cfg.extra.get("arg") or cfg.w
            if raw is None:
                raise InvalidArgumentError("theta4 needs an argument (positional or --w)")
            values.append((target, None, str(raw), theta4(_number(raw, "--w"), q, ctx)))
        else:
            raise InvalidArgumentError(f"unknown target {target!r}")
        entries = []
        for tgt, n, label, v in values:
            s = decimal_string(v, cfg.digits)
            entries.append({"target": tgt, "n": n, "point": label, "value": s})
            rows.append([tgt, "" if n is None else n, label, s])
    report["values"] = entries
    _emit(cfg, report, rows, ["target", "n", "point", "value"])
    return 0


def _check_entry(c, digits):
    entry = {
        "name": c.name,
        "anchor": c.anchor,
        "residual": decimal_string(c.residual, 6),
        "tolerance": decimal_string(c.tolerance, 6),
        "pass": c.passed,
    }
    if c.details:
        entry["details"] = _serial(c.details, min(digits, 20))
    return entry


def cmd_verify(cfg: RunConfig):
    ctx = make_context(cfg.digits)
    report = _envelope(cfg, cfg.target)
    scfg = SuiteConfig(q=cfg.q, n=cfg.n, s=cfg.s, x=cfg.x[0] if cfg.x else None, regime=cfg.regime)
    if cfg.t is not None:
        if len(cfg.t) == 4:
            scfg.finite_t = tuple(cfg.t)
        else:
            scfg.infinite_t = tuple(cfg.t)
    try:
        checks = run_suite(cfg.target, ctx, scfg)
    except ConfigError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(cfg, report, [], ["name", "anchor", "residual", "tolerance", "pass"])
        return 2
    report["checks"] = [_check_entry(c, cfg.digits) for c in checks]
    rows = [[e["name"], e["anchor"], e["residual"], e["tolerance"], "pass" if e["pass"] else "FAIL"] for e in report["checks"]]
    _emit(cfg, report, rows, ["name", "anchor", "residual", "tolerance", "pass"])
    return 0 if all(c.passed for c in checks) else 1


def cmd_zeros(cfg: RunConfig):
    ctx = make_context(cfg.digits)
    report = _envelope(cfg, "zeros")
    with ctx.activate():
        q = _number(cfg.q or DEFAULT_Q, "--q")
        t = cfg.t or ["1", "1", "1"]
        if len(t) != 3:
            raise InvalidParametersError("zeros are computed for the three-parameter family")
        params = fam.InfiniteFamilyParams(q, [_number(v, "--t") for v in t])
        degrees = _degrees(cfg)
        if degrees[0] < 1:
            raise InvalidArgumentError("degrees start at 1 for zeros")
        # one extra degree so the growth table covers the last requested n
        top = degrees[-1] + (1 if len(degrees) > 1 else 0)
        table = fam.vn_zero_table(params, top)
        zeros, rows, checks = [], [], []
        count_ok, interlace_ok = True, True
        for n in degrees:
            zs = table[n - 1]
            count_ok &= len(zs) == n
            if n > 1:
                prev = table[n - 2]
                interlace_ok &= all(zs[i] < prev[i] < zs[i + 1] for i in range(n - 1))
            zeros.append({"n": n, "zeros": [decimal_string(z, cfg.digits) for z in zs]})
            rows.extend([n, i, decimal_string(z, cfg.digits)] for i, z in enumerate(zs))
        growth = []
        for n in degrees:
            if n < top:
                ratio = max(table[n]) / max(table[n - 1])
                growth.append({"n": n, "ratio": decimal_string(ratio, 20), "ratio_times_q2": decimal_string(ratio * q * q, 20)})
        checks.append({"name": "zero-count", "anchor": "V_n has n real zeros", "residual": "0" if count_ok else "1",
                       "tolerance": "0", "pass": bool(count_ok)})
        checks.append({"name": "zero-interlacing", "anchor": "zeros of V_n and V_(n-1) interlace",
                       "residual": "0" if interlace_ok else "1", "tolerance": "0", "pass": bool(interlace_ok)})
    report["checks"] = checks
    report["zeros"] = zeros
    report["growth"] = growth
    _emit(cfg, report, rows, ["n", "index", "zero"])
    return 0 if count_ok and interlace_ok else 1


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "zeros": cmd_zeros}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"qaw: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"qaw: numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
