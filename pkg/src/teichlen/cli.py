"""Command-line entry point.

Every command writes one JSON document (or CSV / JSON lines where noted)
to ``--out`` or stdout.  Output carries no timestamps, so a rerun with the
same configuration and seed is byte-identical.  The exit status is 1 when
any checked inequality fails, 2 on a configuration or domain error.

Settings come from command-line flags, then a JSON ``--config`` file, then
built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import algint, bounds, fields, fn_geometry, words
from .errors import InvalidConfig, TeichlenError
from .precision import precision_mode
from .report import FAIL, compare

SCHEMA_VERSION = 1

COMMON_DEFAULTS = {"out": None, "format": "json", "seed": 0, "workers": 1}

DEFAULTS = {
    "spectrum": {"preset": "bolza", "max_word_len": 6, "cutoff": 6.0},
    "systole": {"preset": "bolza", "max_word_len": 8, "d": 2, "L": 1.0},
    "enumerate-units": {"m": 1, "X": 3.0, "capacity": algint.DEFAULT_CAPACITY},
    "exp-length": {
        "length": None, "preset": "bolza", "max_word_len": 6, "d": 2, "L": 1.0,
        "tolerance": 1e-9, "capacity": algint.DEFAULT_CAPACITY,
    },
    "trace-gap": {"preset": "bolza", "max_word_len": 6, "field": "x^2-2"},
    "xpiece": {"count": 50, "twists": 100, "low": 0.5, "high": 4.0},
    "twist-recover": {
        "gluing": None, "l1": None, "l2": None, "chain1": None, "chain2": None,
        "delta": None, "eta": None, "twist": None, "count": 0, "twists": 10,
    },
    "bounds": {"sweep": "g=2..1000"},
    "counting": {"g_max": 1000, "d": "2,3,4", "L": "1,2", "b": 1.0},
    "distance-bound": {"g": 2, "d": 2, "c_d": None, "c_gap": None},
}


def _add_common(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--config", default=None, help="JSON file of settings (flags override it)")
    p.add_argument("--out", default=s, help="output file (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=s)
    p.add_argument("--seed", type=int, default=s)
    p.add_argument("--workers", type=int, default=s)


def build_parser() -> argparse.ArgumentParser:
    s = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="teichlen", description="Length spectra, trace arithmetic and bound checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="length spectrum of a preset group")
    p.add_argument("--preset", default=s)
    p.add_argument("--max-word-len", type=int, default=s)
    p.add_argument("--cutoff", type=float, default=s)

    p = sub.add_parser("systole", help="shortest closed geodesic among enumerated words")
    p.add_argument("--preset", default=s)
    p.add_argument("--max-word-len", type=int, default=s)
    p.add_argument("--d", type=int, default=s, help="trace field degree for the lower bound")
    p.add_argument("--L", type=float, default=s, help="stretch for the lower bound")

    p = sub.add_parser("enumerate-units", help="reciprocal units of bounded degree and house (JSON lines)")
    p.add_argument("--m", type=int, default=s)
    p.add_argument("--X", type=float, default=s)
    p.add_argument("--capacity", type=int, default=s)

    p = sub.add_parser("exp-length", help="is exp(length) a reciprocal unit of bounded house")
    p.add_argument("--length", type=float, default=s, help="defaults to the preset's systole")
    p.add_argument("--preset", default=s)
    p.add_argument("--max-word-len", type=int, default=s)
    p.add_argument("--d", type=int, default=s)
    p.add_argument("--L", type=float, default=s)
    p.add_argument("--tolerance", type=float, default=s)
    p.add_argument("--capacity", type=int, default=s)

    p = sub.add_parser("trace-gap", help="separation of squared traces")
    p.add_argument("--preset", default=s)
    p.add_argument("--max-word-len", type=int, default=s)
    p.add_argument("--field", default=s, choices=sorted(fields.PRESET_FIELDS))

    p = sub.add_parser("xpiece", help="crossing lengths and bounds on random X-pieces")
    p.add_argument("--count", type=int, default=s)
    p.add_argument("--twists", type=int, default=s)
    p.add_argument("--low", type=float, default=s)
    p.add_argument("--high", type=float, default=s)

    p = sub.add_parser("twist-recover", help="recover a twist from crossing lengths")
    for name in ("gluing", "l1", "l2", "chain1", "chain2", "delta", "eta", "twist"):
        p.add_argument(f"--{name}", type=float, default=s)
    p.add_argument("--count", type=int, default=s, help="random round trips instead of explicit lengths")
    p.add_argument("--twists", type=int, default=s)

    p = sub.add_parser("bounds", help="loop, collar and calculus-lemma checks over a genus sweep")
    p.add_argument("--sweep", default=s, help="g=LO..HI")

    p = sub.add_parser("counting", help="semi-arithmetic counting bounds in log space")
    p.add_argument("--g-max", type=int, default=s)
    p.add_argument("--d", default=s, help="comma-separated degrees")
    p.add_argument("--L", default=s, help="comma-separated stretches")
    p.add_argument("--b", type=float, default=s)

    p = sub.add_parser("distance-bound", help="Teichmueller distance lower bound")
    p.add_argument("--g", type=int, default=s)
    p.add_argument("--d", type=int, default=s)
    p.add_argument("--c-d", type=float, default=s)
    p.add_argument("--c-gap", type=float, default=s)

    for p in sub.choices.values():
        _add_common(p)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults."""
    cfg = {**COMMON_DEFAULTS, **DEFAULTS[args.command]}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidConfig(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InvalidConfig("config file must hold a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = set(loaded) - set(cfg) - {"command"}
        if unknown:
            raise InvalidConfig(f"unknown settings for {args.command}: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k != "command"})
    cfg.update({k: v for k, v in vars(args).items() if k not in ("command", "config")})
    if cfg["workers"] < 1:
        raise InvalidConfig("--workers must be >= 1")
    return cfg


def _reports(rs) -> list[dict]:
    return [r.to_dict() for r in rs]


def _doc(command: str, cfg: dict, **body) -> dict:
    params = {k: v for k, v in cfg.items() if k not in ("out", "format")}
    return {"schema_version": SCHEMA_VERSION, "command": command, "parameters": params, **body}


def _preset(name: str):
    try:
        return words.preset(name)
    except KeyError as exc:
        raise InvalidConfig(f"unknown preset {name!r}; choose from {sorted(words.PRESETS)}") from exc


def _positive(cfg, *names):
    for n in names:
        if cfg[n] is None or not cfg[n] > 0:
            raise InvalidConfig(f"--{n.replace('_', '-')} must be positive, got {cfg[n]!r}")


# -- commands ----------------------------------------------------------------


def cmd_spectrum(cfg):
    _positive(cfg, "max_word_len", "cutoff")
    spec = words.length_spectrum(_preset(cfg["preset"]), cfg["max_word_len"], cfg["cutoff"], workers=cfg["workers"])
    print(
        f"note: lengths from words of length <= {cfg['max_word_len']} only; "
        "multiplicities and completeness below the cutoff are not guaranteed",
        file=sys.stderr,
    )
    if cfg["format"] == "csv":
        return spec.to_csv(), []
    doc = _doc("spectrum", cfg, complete=False, entries=spec.to_rows())
    return doc, []


def cmd_systole(cfg):
    _positive(cfg, "max_word_len")
    value = words.systole(_preset(cfg["preset"]), cfg["max_word_len"], workers=cfg["workers"])
    lower = algint.systole_lower_bound(cfg["d"], cfg["L"])
    rep = compare(
        "systole-lower-bound",
        value,
        ">=",
        lower,
        citation="systole >= log(2)/(4dL)",
        inputs={"preset": cfg["preset"], "d": cfg["d"], "L": cfg["L"]},
    )
    print(repr(value), file=sys.stderr)
    return _doc("systole", cfg, systole=value, reports=_reports([rep])), [rep]


def cmd_enumerate_units(cfg):
    _positive(cfg, "m", "X", "capacity")
    m, X = cfg["m"], cfg["X"]
    units = algint.enumerate_reciprocal_units(m, X, capacity=cfg["capacity"], workers=cfg["workers"])
    bound = algint.count_bound(m, X)
    reps = [
        compare(
            "house-counting-bound",
            len(units),
            "<=",
            bound,
            citation="|U_m(X)| <= 2m(4mX)^(m^2)",
            inputs={"m": m, "X": X},
        )
    ]
    for u in units:
        if abs(u.house - 1.0) > algint.HOUSE_TOL:
            reps.append(algint.check_dimitrov(u, u.degree // 2))
    bad = sum(1 for r in reps[1:] if r.status == FAIL)
    print(f"{len(units)} <= {bound:g}; house-bound violations: {bad}", file=sys.stderr)
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "coeffs", "real_root", "house"])
        for u in units:
            w.writerow([u.degree, " ".join(map(str, u.min_poly.coeffs)), repr(u.real_root), repr(u.house)])
        return buf.getvalue(), reps
    return "".join(u.to_json() + "\n" for u in units), reps


def cmd_exp_length(cfg):
    length = cfg["length"]
    if length is None:
        length = words.systole(_preset(cfg["preset"]), cfg["max_word_len"], workers=cfg["workers"])
    rep = algint.exp_length_is_unit(
        length, cfg["d"], cfg["L"], tolerance=cfg["tolerance"], capacity=cfg["capacity"], workers=cfg["workers"]
    )
    return _doc("exp-length", cfg, length=length, reports=_reports([rep])), [rep]


def cmd_trace_gap(cfg):
    field = fields.field_preset(cfg["field"])
    elements = fields.harvest_traces(_preset(cfg["preset"]), cfg["max_word_len"], field)
    sweep = fields.gap_sweep(elements)
    rep = compare(
        "trace-gap",
        sweep["violations"],
        "<=",
        0,
        citation="|t^2 - t'^2| > 1/4^(d-1) for integral traces with distinct absolute value",
        inputs={"preset": cfg["preset"], "max_word_len": cfg["max_word_len"], "field": cfg["field"]},
        notes=(f"pairs {sweep['pairs']}", f"min gap {sweep['min_gap']!r}", f"bound {sweep['bound']!r}"),
    )
    return _doc("trace-gap", cfg, traces=len(elements), sweep=sweep, reports=_reports([rep])), [rep]


def _record(x, recovered=None):
    ld, le = fn_geometry.xpiece_cross_lengths(x)
    rec = {
        "gluing": x.gluing,
        "boundaries": [x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3],
        "alpha": x.twist,
        "delta": ld,
        "eta": le,
    }
    if recovered is not None:
        rec["recovered_alpha"] = recovered
        rec["residual"] = abs(recovered - x.twist)
    return rec


def cmd_xpiece(cfg):
    rng = np.random.default_rng(cfg["seed"])
    reps, records = [], []
    worst_shift = 0.0
    for _ in range(cfg["count"]):
        x = fn_geometry.random_xpiece(rng, cfg["low"], cfg["high"], twist=0.0)
        for a in np.linspace(0.0, x.gluing, cfg["twists"], endpoint=False):
            xa = x.with_twist(float(a))
            _, le = fn_geometry.xpiece_cross_lengths(xa)
            ld_shift, _ = fn_geometry.xpiece_cross_lengths(x.with_twist(float(a) + x.gluing))
            worst_shift = max(worst_shift, abs(le - ld_shift))
        xr = x.with_twist(float(rng.uniform(0.0, x.gluing)))
        records.append(_record(xr))
        reps.append(fn_geometry.delta_bound_check(xr))
    reps.insert(
        0,
        compare(
            "eta-delta-shift",
            worst_shift,
            "<",
            1e-9,
            citation="l(eta at alpha) = l(delta at alpha + l(gamma))",
            inputs={"count": cfg["count"], "twists": cfg["twists"]},
        ),
    )
    return _doc("xpiece", cfg, pieces=records, reports=_reports(reps)), reps


def cmd_twist_recover(cfg):
    reps, records = [], []
    if cfg["count"]:
        rng = np.random.default_rng(cfg["seed"])
        for _ in range(cfg["count"]):
            x = fn_geometry.random_xpiece(rng, twist=0.0)
            for a in rng.uniform(0.0, x.gluing, cfg["twists"]):
                xa = x.with_twist(float(a))
                ld, le = fn_geometry.xpiece_cross_lengths(xa)
                got = fn_geometry.twist_recover(x.gluing, x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3, ld, le)
                records.append(_record(xa, got))
    else:
        _positive(cfg, "gluing", "l1", "l2", "chain1", "chain2")
        x = fn_geometry.XPiece.from_lengths(cfg["gluing"], cfg["l1"], cfg["l2"], cfg["chain1"], cfg["chain2"])
        if cfg["twist"] is not None:
            xa = x.with_twist(cfg["twist"])
            ld, le = fn_geometry.xpiece_cross_lengths(xa)
            got = fn_geometry.twist_recover(x.gluing, x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3, ld, le)
            records.append(_record(xa, got))
        else:
            _positive(cfg, "delta", "eta")
            got = fn_geometry.twist_recover(x.gluing, x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3, cfg["delta"], cfg["eta"])
            records.append({**_record(x.with_twist(got)), "recovered_alpha": got})
    for r in records:
        if "residual" in r:
            reps.append(
                compare(
                    "twist-round-trip",
                    r["residual"],
                    "<",
                    1e-6,
                    citation="twist is determined by the lengths of delta and eta",
                    inputs={"gluing": r["gluing"], "alpha": r["alpha"]},
                )
            )
    return _doc("twist-recover", cfg, records=records, reports=_reports(reps)), reps


def _parse_sweep(text: str) -> range:
    try:
        name, span = text.split("=")
        lo, hi = span.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise InvalidConfig(f"sweep must look like g=LO..HI, got {text!r}") from exc
    if name.strip() != "g" or lo < 2 or hi < lo:
        raise InvalidConfig(f"sweep must be g=LO..HI with 2 <= LO <= HI, got {text!r}")
    return range(lo, hi + 1)


def cmd_bounds(cfg):
    reps = bounds.bounds_sweep(_parse_sweep(cfg["sweep"]))
    failed = [r.to_dict() for r in reps if r.status == FAIL]
    summary = {}
    for r in reps:
        s = summary.setdefault(r.name, {"checked": 0, "failed": 0, "min_margin": math.inf})
        s["checked"] += 1
        s["failed"] += r.status == FAIL
        s["min_margin"] = min(s["min_margin"], r.margin)
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "inputs", "lhs", "relation", "rhs", "status"])
        for r in reps:
            w.writerow([r.name, json.dumps(r.inputs, sort_keys=True), repr(r.lhs), r.relation, repr(r.rhs), r.status])
        return buf.getvalue(), reps
    return _doc("bounds", cfg, summary=summary, failures=failed), reps


def _floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",")]
    except ValueError as exc:
        raise InvalidConfig(f"expected a comma-separated list, got {text!r}") from exc


def cmd_counting(cfg):
    if cfg["g_max"] < 2:
        raise InvalidConfig("--g-max must be >= 2")
    ds = [int(v) for v in _floats(cfg["d"])]
    Ls = _floats(cfg["L"])
    try:
        rows, U, reps = bounds.counting_sweep(range(2, cfg["g_max"] + 1), ds, Ls, b=cfg["b"])
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    if cfg["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["g", "d", "L", "log_lower", "log_upper", "C"])
        for cb in rows:
            i = cb.inputs
            w.writerow([i.g, i.d, i.L, repr(cb.log_lower), repr(cb.log_upper), repr(cb.C)])
        return buf.getvalue(), reps
    failed = [r.to_dict() for r in reps if r.status == FAIL]
    doc = _doc(
        "counting",
        cfg,
        U=U,
        checked=len(reps),
        failures=failed,
        notes=[f"sigma, B, b and U: {bounds.UNSPECIFIED}"],
    )
    return doc, reps


def cmd_distance_bound(cfg):
    try:
        inp = bounds.DistanceBoundInputs.with_defaults(cfg["g"], cfg["d"], c_d=cfg["c_d"], c_gap=cfg["c_gap"])
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    return _doc("distance-bound", cfg, result=bounds.distance_lower_bound(inp).to_dict()), []


COMMANDS = {
    "spectrum": cmd_spectrum,
    "systole": cmd_systole,
    "enumerate-units": cmd_enumerate_units,
    "exp-length": cmd_exp_length,
    "trace-gap": cmd_trace_gap,
    "xpiece": cmd_xpiece,
    "twist-recover": cmd_twist_recover,
    "bounds": cmd_bounds,
    "counting": cmd_counting,
    "distance-bound": cmd_distance_bound,
}


def _render(out) -> str:
    if isinstance(out, str):
        return out
    return json.dumps(out, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _sanitize(o):
    if isinstance(o, float) and not math.isfinite(o):
        return None if math.isnan(o) else ("inf" if o > 0 else "-inf")
    if isinstance(o, dict):
        return {k: _sanitize(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_sanitize(v) for v in o]
    return o


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        precision_mode()  # validate the environment early
        out, reps = COMMANDS[args.command](cfg)
    except (TeichlenError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = _render(out if isinstance(out, str) else _sanitize(out))
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if any(r.status == FAIL for r in reps) else 0


def main() -> None:
    sys.exit(run())
