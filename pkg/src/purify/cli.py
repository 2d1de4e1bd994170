"""Command-line front end.

Usage::

    purify SUBCOMMAND [--config FILE] [--flag VALUE ...] [key=value ...]

Parameters come from, in increasing precedence: built-in defaults, the
``--config`` file (flat ``key=value`` lines, ``#`` comments), positional
``key=value`` overrides, and explicit flags.  Unknown keys are rejected.
Every CSV starts with ``# key=value`` lines echoing the resolved config.

Exit codes: 0 success, 1 certification failure, 2 configuration error,
3 below-threshold or unreachable-target diagnostic.

Graph files use the edge-list grammar::

    vertices 4        # optional
    0 1               # edge
    color 0 0         # optional vertex colour; all or none
"""
from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, certify
from . import bipartite as bp
from . import multipartite as mp
from . import repeater as rp
from .errors import BelowThresholdError, UnreachableTargetError
from .graphs import Graph, GraphError, NotTwoColorableError, coloring_of, parse_edge_list, two_color
from .states import GateNoiseModel, NoiseKind, WernerParam, entropy, werner_from_fidelity

EXIT_OK, EXIT_CERT, EXIT_CONFIG, EXIT_THRESHOLD = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# -- parameter schema -----------------------------------------------------


def _floats(s: str) -> list[float]:
    return [float(v) for v in str(s).split(",") if v.strip()]


def _ints(s: str) -> list[int]:
    return [int(v) for v in str(s).split(",") if v.strip()]


def _opt_float(s):
    return None if str(s).lower() in ("", "none", "auto") else float(s)


def _opt_int(s):
    return None if str(s).lower() in ("", "none", "auto") else int(s)


def _opt_str(s):
    return None if str(s).lower() in ("", "none") else str(s)


COMMON = {
    "noise_kind": (str, "depolarizing"),
    "eta": (_opt_float, None),
    "seed": (int, 0),
    "out": (_opt_str, None),
    "workers": (int, 1),
}

SCHEMAS = {
    "curve": {
        "protocol": (str, "bbpssw"),
        "p": (_floats, "1,0.99,0.98,0.97"),
        "f_lo": (float, 0.25),
        "f_hi": (float, 1.0),
        "points": (int, 151),
    },
    "threshold": {
        "protocol": (str, "bbpssw"),
        "graph": (_opt_str, None),
        "family": (_opt_str, None),
        "n": (_ints, "4"),
        "p": (_opt_str, None),
        "p_lo": (float, 0.9),
        "points": (int, 11),
        "resolution": (int, 1000),
        "tol": (float, 1e-5),
    },
    "repeater": {
        "protocol": (str, "dejmps"),
        "levels": (int, 4),
        "F_elem": (float, 0.96),
        "F0": (_opt_float, None),
        "M": (_opt_int, None),
        "p": (float, 0.995),
        "mode": (str, "expected"),
        "trials": (int, 100),
    },
    "multipartite": {
        "graph": (_opt_str, None),
        "family": (str, "line"),
        "n": (int, 4),
        "p": (float, 1.0),
        "q": (float, 0.95),
        "rounds": (int, 20),
        "scheme": (str, "auto"),
        "variant": (str, "purifying"),
    },
    "hashing": {
        "f_lo": (float, 0.5),
        "f_hi": (float, 1.0),
        "points": (int, 51),
        "p": (float, 0.99),
        "m": (_ints, "0,10,50,100,200"),
    },
    "oracle-certify": {
        "cases": (int, 100),
    },
}

FLAGS = {
    "protocol": "--protocol",
    "noise_kind": "--noise-kind",
    "p": "--p",
    "eta": "--eta",
    "graph": "--graph",
    "levels": "--levels",
    "seed": "--seed",
    "out": "--out",
}


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path!r}: {e.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def resolve_config(command: str, file_values: dict, overrides: dict, flags: dict) -> dict:
    """Merge defaults < file < key=value overrides < flags and coerce types."""
    schema = {**COMMON, **SCHEMAS[command]}
    raw = {}
    for source in (file_values, overrides, flags):
        for k, v in source.items():
            if k not in schema:
                raise ConfigError(f"unknown key {k!r} for {command}; allowed: {', '.join(sorted(schema))}")
            raw[k] = v
    cfg = {}
    for k, (conv, default) in schema.items():
        v = raw.get(k, default)
        if k not in raw and not isinstance(default, str):
            cfg[k] = default
            continue
        try:
            cfg[k] = conv(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {k}: {v!r}") from None
    try:
        cfg["noise_kind"] = NoiseKind(cfg["noise_kind"]).value
    except ValueError:
        raise ConfigError(f"noise_kind must be one of {[k.value for k in NoiseKind]}") from None
    if cfg["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    return cfg


# -- CSV ------------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % (float(v) + 0.0)  # no "-0"
    if v is None:
        return ""
    return str(v)


def _header_value(v) -> str:
    # shortest round-trip repr keeps the echoed config readable
    if isinstance(v, list):
        return ",".join(_header_value(x) for x in v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return fmt(v)


def write_csv(stream, command: str, cfg: dict, columns, rows, extra_header=()) -> None:
    stream.write(f"# command={command}\n")
    stream.write(f"# version={__version__}\n")
    for k in sorted(cfg):
        if k in ("out", "workers"):
            continue
        stream.write(f"# {k}={_header_value(cfg[k])}\n")
    for k, v in extra_header:
        stream.write(f"# {k}={_header_value(v)}\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def _pool_map(fn, items, workers: int):
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _noise(cfg, p) -> GateNoiseModel:
    return GateNoiseModel(cfg["noise_kind"], p, cfg.get("eta"))


# -- subcommands ----------------------------------------------------------


def _curve_rows(args):
    protocol, p, kind, eta, grid = args
    noise = GateNoiseModel(kind, p, eta)
    rows = []
    for F in grid:
        if protocol == "bbpssw":
            r = bp.bbpssw_step(float(F), None, noise)
        else:
            r = bp.dejmps_step(werner_from_fidelity(float(F)), None, noise)
        rows.append((p, F, r.fidelity, r.fidelity - F, r.p_success))
    return rows


def run_curve(cfg):
    if cfg["protocol"] not in bp.PROTOCOLS:
        raise ConfigError(f"curve protocol must be one of {bp.PROTOCOLS}")
    if cfg["points"] < 2 or not (0.0 <= cfg["f_lo"] < cfg["f_hi"] <= 1.0):
        raise ConfigError("need points >= 2 and 0 <= f_lo < f_hi <= 1")
    grid = np.linspace(cfg["f_lo"], cfg["f_hi"], cfg["points"])
    jobs = [(cfg["protocol"], p, cfg["noise_kind"], cfg["eta"], grid) for p in cfg["p"]]
    for p in cfg["p"]:
        if not (0.0 <= p <= 1.0):
            raise ConfigError(f"p={p} outside [0, 1]")
    rows = [r for chunk in _pool_map(_curve_rows, jobs, cfg["workers"]) for r in chunk]
    return ["p", "F_in", "F_out", "gain", "p_success"], rows, ()


def _graph_from(cfg, n=None) -> Graph:
    if cfg.get("graph"):
        try:
            return parse_edge_list(Path(cfg["graph"]).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read graph file {cfg['graph']!r}: {e.strerror}") from None
    fam = cfg.get("family") or "line"
    builders = {"line": Graph.line, "ring": Graph.ring, "ghz": Graph.ghz, "star": Graph.star,
                "complete": Graph.complete}
    if fam not in builders:
        raise ConfigError(f"family must be one of {sorted(builders)}")
    n = cfg["n"] if n is None else n
    if n < 2:
        raise ConfigError("graphs need n >= 2")
    return builders[fam](n)


def _threshold_models(cfg):
    proto = cfg["protocol"]
    if proto in bp.PROTOCOLS:
        return [(proto, proto, None)]
    if proto == "graph":
        if cfg["graph"]:
            g = _graph_from(cfg)
            return [(f"graph-{g.n}", "graph", g)]
        fam = cfg["family"] or "line"
        return [(f"{fam}-{n}", "graph", _graph_from(cfg, n)) for n in cfg["n"]]
    if proto == "ghz-toy":
        return [(f"ghz-toy-{n}", "ghz-toy", n) for n in cfg["n"]]
    raise ConfigError("threshold protocol must be bbpssw, dejmps, graph or ghz-toy")


def _threshold_point(args):
    label, proto, obj, p, kind, resolution = args
    r = analysis.purification_range(proto, p, resolution, graph=obj, noise_kind=kind)
    return (label, p, r.F_min, r.F_max)


def _threshold_summary(args):
    label, proto, obj, kind, tol = args
    if proto == "ghz-toy":
        return analysis.threshold_p("ghz-toy", tol, n=obj)
    return analysis.threshold_p(proto, tol, graph=obj, noise_kind=kind)


def run_threshold(cfg):
    models = _threshold_models(cfg)
    if cfg["p"]:
        grid = _floats(cfg["p"])
    else:
        if cfg["points"] < 1:
            raise ConfigError("points must be >= 1")
        grid = list(np.linspace(cfg["p_lo"], 1.0, cfg["points"]))
    for p in grid:
        if not (0.0 < p <= 1.0):
            raise ConfigError(f"p={p} outside (0, 1]")
    rows = []
    jobs = [(lab, pr, obj, float(p), cfg["noise_kind"], cfg["resolution"]) for lab, pr, obj in models for p in grid]
    if models[0][1] != "ghz-toy":  # the toy model has no fidelity range, only a threshold
        rows += _pool_map(_threshold_point, jobs, cfg["workers"])
    summ = _pool_map(_threshold_summary, [(lab, pr, obj, cfg["noise_kind"], cfg["tol"]) for lab, pr, obj in models],
                     cfg["workers"])
    for (lab, _, obj), pmin in zip(models, summ):
        rows.append((f"p_min:{lab}", pmin, "", ""))
        if isinstance(obj, int):
            rows.append((f"closed_form:{lab}", mp.ghz_toy_threshold(obj), "", ""))
    extra = []
    for lab, _, obj in models:
        if isinstance(obj, Graph):
            extra.append((f"coloring[{lab}]", ";".join(" ".join(map(str, c)) for c in coloring_of(obj))))
    return ["kind", "p", "F_min", "F_max"], rows, extra


def run_repeater(cfg):
    noise = _noise(cfg, cfg["p"])
    try:
        rcfg = rp.RepeaterConfig(cfg["levels"], werner_from_fidelity(cfg["F_elem"]), cfg["protocol"], cfg["F0"],
                                 cfg["M"], noise, cfg["mode"], cfg["seed"], cfg["trials"])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    res = rp.repeater_run(rcfg)
    rows = [(L.level, L.distance, L.fidelity_after_swap, L.fidelity_after_purify, L.pairs_total, L.time_steps)
            for L in res.levels]
    extra = [("F0_resolved", res.F0), ("memory_per_station", res.resources.memory_per_station)]
    return ["level", "distance", "fidelity_after_swap", "fidelity_after_purify", "pairs_total", "time_steps"], rows, extra


def run_multipartite(cfg):
    g = _graph_from(cfg)
    if g.coloring is None:
        try:
            g = g.with_coloring(two_color(g))
        except NotTwoColorableError:
            g = g.with_coloring(coloring_of(g))
    noise = GateNoiseModel(cfg["noise_kind"], cfg["p"])
    s = mp.GraphDiagonalState.white_noise(g, cfg["q"])
    scheme = cfg["scheme"]
    if scheme == "auto":
        scheme = "p1p2" if len(g.coloring) <= 2 else "kcolor"
    if scheme == "p1p2":
        if len(g.coloring) > 2:
            raise ConfigError("p1p2 needs a two-colourable graph")
        traj = mp.purify_two_colorable(s, "12", cfg["rounds"], noise)
    elif scheme == "kcolor":
        if cfg["variant"] not in ("erase", "purifying"):
            raise ConfigError("variant must be erase or purifying")
        traj = mp.kcolor_purify(s, cfg["rounds"], cfg["variant"], noise)
    else:
        raise ConfigError("scheme must be auto, p1p2 or kcolor")
    rows = [(0, "input", traj.states[0].fidelity, 1.0)]
    for i, (name, st, ps) in enumerate(zip(traj.steps, traj.states[1:], traj.p_success), 1):
        rows.append((i, name, st.fidelity, ps))
    extra = [("graph_edges", ";".join(f"{u} {v}" for u, v in g.sorted_edges())),
             ("coloring", ";".join(" ".join(map(str, c)) for c in g.coloring)),
             ("converged", traj.converged)]
    return ["step", "subprotocol", "fidelity", "p_success"], rows, extra


def run_hashing(cfg):
    if cfg["points"] < 2 or not (0.0 <= cfg["f_lo"] < cfg["f_hi"] <= 1.0):
        raise ConfigError("need points >= 2 and 0 <= f_lo < f_hi <= 1")
    rows = []
    for F in np.linspace(cfg["f_lo"], cfg["f_hi"], cfg["points"]):
        st = werner_from_fidelity(float(F))
        rows.append(("werner", F, entropy(st), bp.hashing_yield(st)))
    root = bp.breeding_threshold_werner()
    rows.append(("breeding_threshold", root, entropy(werner_from_fidelity(root)), 0.0))
    for m in cfg["m"]:
        x = bp.hashing_noisy_target(cfg["p"], m)
        st = x.to_bell()
        rows.append((f"noisy_target:m={m}", WernerParam(x.x).fidelity, entropy(st), bp.hashing_yield(st)))
    return ["kind", "F", "entropy", "yield"], rows, ()


def run_oracle_certify(cfg):
    rows = certify.run_all(cfg["cases"], cfg["seed"])
    ok = all(r.passed for r in rows)
    out = [(r.check, r.cases, r.max_deviation, r.tol, r.passed) for r in rows]
    return ["check", "cases", "max_abs_dev", "tol", "pass"], out, (), ok


RUNNERS = {
    "curve": run_curve,
    "threshold": run_threshold,
    "repeater": run_repeater,
    "multipartite": run_multipartite,
    "hashing": run_hashing,
    "oracle-certify": run_oracle_certify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="purify", description="Entanglement purification experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key=value file")
        for key, flag in FLAGS.items():
            sp.add_argument(flag, dest=key, default=None)
        sp.add_argument("overrides", nargs="*", metavar="key=value")
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    try:
        file_values = read_config_file(args.config) if args.config else {}
        overrides = {}
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"expected key=value, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        flags = {k: getattr(args, k) for k in FLAGS if getattr(args, k) is not None}
        cfg = resolve_config(args.command, file_values, overrides, flags)
        result = RUNNERS[args.command](cfg)
    except (ConfigError, GraphError) as e:
        print(f"purify: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (BelowThresholdError, UnreachableTargetError) as e:
        print(f"purify: {e}", file=sys.stderr)
        return EXIT_THRESHOLD
    except ValueError as e:
        print(f"purify: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    columns, rows, extra = result[:3]
    buf = io.StringIO()
    write_csv(buf, args.command, cfg, columns, rows, extra)
    if cfg["out"]:
        Path(cfg["out"]).write_text(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    if len(result) > 3 and not result[3]:
        print("purify: oracle certification failed", file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
