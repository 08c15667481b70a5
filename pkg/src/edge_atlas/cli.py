"""Command-line entry point: every computation as a subcommand.

Artifacts are plot-ready CSV/JSON only (no rendering). Determinism
contract: identical run configurations produce byte-identical output
files, so JSON artifacts carry the resolved configuration (and no
wall-clock fields) and CSV artifacts reference it by hash in a leading
comment line. Floats are written with 12 significant digits.

Exit status: 0 on success, 2 for usage/validation errors (nothing is
written), 1 when a computation fails (the module error is surfaced as a
one-line JSON object on stderr).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import ConfigError, EdgeAtlasError
from .datasets import compute_stats, load_mnist, subset
from .experiments import (
    DESK_SEEDS,
    DESK_TEST_SUBSET,
    DESK_TRAIN_SUBSET,
    SweepSpec,
    run_depth_sweep,
    run_eoc_sweep,
    run_post_evolution,
    run_threshold_sweep,
)
from .fitting import fit_threshold
from .gaussian_calculus import get_activation
from .network import NetworkConfig, TrainConfig, init_network, train
from .phase_map import (
    PhasePoint,
    eoc_curve,
    line_of_uniformity,
    lou_eoc_intersection,
    solve_eoc_point,
    solve_fixed_point,
)

_FLOAT_FMT = ".12g"


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, _FLOAT_FMT)
    return str(v)


def _scientific(params: dict) -> dict:
    # artifact destinations do not influence the computation; identical
    # run configurations must give byte-identical files wherever written
    return {k: v for k, v in params.items() if k not in ("out", "csv")}


def _config_hash(params: dict) -> str:
    canon = json.dumps(_scientific(params), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _write_csv(path, columns: Sequence[str], rows, params: dict) -> None:
    lines = [f"# config_hash={_config_hash(params)}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, params: dict, result) -> None:
    payload = {
        "config": _scientific(params),
        "config_hash": _config_hash(params),
        "code_version": __version__,
        "result": result,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _load_schema() -> dict:
    with resources.files("edge_atlas.schemas").joinpath(
        "run_config.schema.json"
    ).open() as fh:
        return json.load(fh)


def _load_config(path, subcommand: str) -> dict:
    import jsonschema

    try:
        document = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(document, _load_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config {path} invalid: {exc.message}") from exc
    return document.get(subcommand, {})


def _merge(args: argparse.Namespace, config_block: dict, defaults: dict) -> dict:
    """Resolve parameters: explicit flag > config file > default."""
    params = {}
    for key, default in defaults.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            params[key] = flag_val
        elif key in config_block:
            params[key] = config_block[key]
        else:
            params[key] = default
    return params


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _require(parser: argparse.ArgumentParser, params: dict, keys: Sequence[str]):
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        parser.error(f"missing required parameter(s): {', '.join(missing)}")


# ---------------------------------------------------------------------------
# Subcommand handlers (each returns the process exit status)
# ---------------------------------------------------------------------------

def _cmd_lou(parser, args) -> int:
    defaults = {"sigma_w2": None, "from": None, "to": None, "points": 50, "out": None}
    p = _merge(args, _cfg(args, "lou"), defaults)
    if p["sigma_w2"] is None and (p["from"] is None or p["to"] is None):
        parser.error("lou needs --sigma-w2, or --from/--to with --out")
    if p["sigma_w2"] is not None:
        b2 = line_of_uniformity(p["sigma_w2"])
        print(f"lou: sigma_b2 = {_fmt(b2)} at sigma_w2 = {_fmt(p['sigma_w2'])}")
        return 0
    if p["points"] < 2:
        parser.error("--points must be >= 2")
    ws = np.linspace(p["from"], p["to"], p["points"])
    rows = [(float(w), line_of_uniformity(float(w))) for w in ws]
    if p["out"]:
        _write_csv(p["out"], ["sigma_w2", "sigma_b2"], rows, p)
    print(f"lou: {len(rows)} points over [{_fmt(p['from'])}, {_fmt(p['to'])}]")
    return 0


def _cmd_eoc(parser, args) -> int:
    defaults = {
        "activation": "tanh", "from": 1.0, "to": 10.0, "points": 50,
        "spacing": "uniform", "out": None,
    }
    p = _merge(args, _cfg(args, "eoc"), defaults)
    if p["points"] < 2:
        parser.error("--points must be >= 2")
    if not p["to"] > p["from"]:
        parser.error("--to must exceed --from")
    curve = eoc_curve(
        (p["from"], p["to"]), p["points"], get_activation(p["activation"]),
        spacing=p["spacing"],
    )
    rows = [(pt.sigma_w2, pt.sigma_b2) for pt in curve.points]
    if p["out"]:
        _write_csv(p["out"], ["sigma_w2", "sigma_b2"], rows, p)
    print(
        f"eoc: {len(rows)} critical points ({len(curve.gaps)} gaps) "
        f"for {p['activation']}"
    )
    return 0


def _cmd_fixed_point(parser, args) -> int:
    defaults = {
        "sigma_w2": None, "sigma_b2": None, "activation": "tanh",
        "seed_variance": None, "out": None,
    }
    p = _merge(args, _cfg(args, "fixed-point"), defaults)
    _require(parser, p, ["sigma_w2", "sigma_b2"])
    sol = solve_fixed_point(
        PhasePoint(p["sigma_w2"], p["sigma_b2"]),
        get_activation(p["activation"]),
        seed_variance=p["seed_variance"],
    )
    result = {
        "sigma_star2": sol.sigma_star2,
        "sigma_phi_star2": sol.sigma_phi_star2,
        "chi": sol.chi,
        "chi_tilde": sol.chi_tilde,
        "xi": sol.xi,
        "xi_tilde": sol.xi_tilde,
        "iterations": sol.iterations,
        "residual": sol.residual,
    }
    if p["out"]:
        _write_json(p["out"], p, result)
    print(
        f"fixed-point: sigma_star2 = {_fmt(sol.sigma_star2)}, "
        f"chi = {_fmt(sol.chi)}"
    )
    return 0


def _cmd_phase_grid(parser, args) -> int:
    defaults = {
        "activation": "tanh", "w_from": 0.5, "w_to": 4.0, "w_points": 30,
        "b_from": 0.0, "b_to": 0.5, "b_points": 20, "out": None,
    }
    p = _merge(args, _cfg(args, "phase-grid"), defaults)
    _require(parser, p, ["out"])
    from .phase_map import phase_grid

    grid = phase_grid(
        (p["w_from"], p["w_to"]), (p["b_from"], p["b_to"]),
        (p["w_points"], p["b_points"]), get_activation(p["activation"]),
    )
    rows = []
    for i, b2 in enumerate(grid.b_axis):
        for j, w2 in enumerate(grid.w_axis):
            rows.append(
                (float(w2), float(b2), float(grid.chi_field[i, j]),
                 float(grid.entropy_field[i, j]))
            )
    _write_csv(p["out"], ["sigma_w2", "sigma_b2", "chi", "log_rel_entropy"], rows, p)
    print(f"phase-grid: {len(rows)} cells -> {p['out']}")
    return 0


def _cmd_intersect(parser, args) -> int:
    defaults = {"activation": "tanh", "out": None}
    p = _merge(args, _cfg(args, "intersect"), defaults)
    point = lou_eoc_intersection(get_activation(p["activation"]))
    if p["out"]:
        _write_json(
            p["out"], p,
            {"sigma_w2": point.sigma_w2, "sigma_b2": point.sigma_b2},
        )
    print(
        f"intersect: (sigma_w2, sigma_b2) = "
        f"({_fmt(point.sigma_w2)}, {_fmt(point.sigma_b2)})"
    )
    return 0


def _cmd_post_evol(parser, args) -> int:
    defaults = {
        "sigma_w2": 1.76, "sigma_b2": 0.05, "sigma1": [0.1, 0.57, 3.0],
        "depth": 30, "width": 512, "samples": 128, "activation": "tanh",
        "seed": 0, "bins": 100, "out": None,
    }
    p = _merge(args, _cfg(args, "post-evol"), defaults)
    evo = run_post_evolution(
        PhasePoint(p["sigma_w2"], p["sigma_b2"]), p["sigma1"],
        depth=p["depth"], width=p["width"], n_samples=p["samples"],
        act=p["activation"], seed=p["seed"],
    )
    histograms = {}
    for s1 in evo.sigma1_values:
        layers = []
        for layer in range(p["depth"]):
            counts, edges = evo.histogram(s1, layer, bins=p["bins"])
            layers.append({"counts": counts.tolist(), "edges": edges.tolist()})
        histograms[str(s1)] = layers
    ks = {}
    vals = evo.sigma1_values
    probe_layer = min(9, p["depth"] - 1)
    for i, a in enumerate(vals):
        for b in vals[i + 1:]:
            ks[f"{a}|{b}"] = evo.ks_distance(a, b, probe_layer)
    if p["out"]:
        _write_json(
            p["out"], p,
            {"histograms": histograms, "ks_at_layer": probe_layer + 1, "ks": ks},
        )
    worst = max(ks.values()) if ks else float("nan")
    print(
        f"post-evol: layer-{probe_layer + 1} max pairwise KS = {_fmt(worst)} "
        f"over sigma1 = {list(vals)}"
    )
    return 0


def _cmd_train(parser, args) -> int:
    defaults = {
        "sigma_w2": 1.76, "sigma_b2": 0.05, "activation": "tanh",
        "depth": 3, "width": 64, "epochs": 3, "learning_rate": 1e-3,
        "momentum": 0.8, "batch_size": 64, "seed": 0,
        "train_subset": DESK_TRAIN_SUBSET, "test_subset": DESK_TEST_SUBSET,
        "data_dir": None, "out": None,
    }
    p = _merge(args, _cfg(args, "train"), defaults)
    train_set = load_mnist(p["data_dir"], "train")
    test_set = load_mnist(p["data_dir"], "test")
    if p["train_subset"] < len(train_set):
        train_set = subset(train_set, p["train_subset"], p["seed"])
    if p["test_subset"] < len(test_set):
        test_set = subset(test_set, p["test_subset"], p["seed"] + 1)
    net = init_network(
        NetworkConfig(
            depth=p["depth"], width=p["width"],
            input_dim=train_set.images.shape[1], output_dim=10,
            activation=get_activation(p["activation"]),
            init=PhasePoint(p["sigma_w2"], p["sigma_b2"]),
            seed=p["seed"],
        )
    )
    record = train(
        net, train_set, test_set,
        TrainConfig(
            learning_rate=p["learning_rate"], batch_size=p["batch_size"],
            momentum=p["momentum"], epochs=p["epochs"], rng_seed=p["seed"],
        ),
    )
    result = record.to_dict()
    result.pop("epoch_seconds", None)  # keep artifacts byte-reproducible
    if p["out"]:
        _write_json(p["out"], p, result)
    print(
        f"train: final test accuracy = "
        f"{_fmt(record.test_accuracy[-1] if record.test_accuracy else float('nan'))}"
    )
    return 0


def _sweep_common_defaults() -> dict:
    return {
        "width": 64, "epochs": 3, "learning_rate": 1e-3, "momentum": 0.8,
        "batch_size": 64, "seeds": list(DESK_SEEDS),
        "train_subset": DESK_TRAIN_SUBSET, "test_subset": DESK_TEST_SUBSET,
        "threads": 1, "data_dir": None, "out": None, "csv": None,
    }


def _sweep_outputs(p: dict, result, label: str) -> None:
    if p["out"]:
        _write_json(p["out"], p, result.to_dict(volatile=False))
    if p["csv"]:
        rows = [
            (k[0], k[1], k[2], v["mean"], v["std"], v["n_converged"])
            for k, v in result.aggregate().items()
        ]
        _write_csv(
            p["csv"],
            ["depth", "sigma_w2", "sigma_b2", "mean_accuracy", "std_accuracy",
             "n_converged"],
            rows, p,
        )
    agg = result.aggregate()
    best = max((v["mean"] for v in agg.values() if np.isfinite(v["mean"])), default=float("nan"))
    print(f"{label}: {len(result.runs)} runs over {len(agg)} cells, best mean accuracy = {_fmt(best)}")


def _cmd_sweep_eoc(parser, args) -> int:
    defaults = {"activation": "tanh", "w2_list": None, "depth": 20,
                **_sweep_common_defaults()}
    p = _merge(args, _cfg(args, "sweep-eoc"), defaults)
    _require(parser, p, ["w2_list"])
    act = get_activation(p["activation"])
    points = tuple(
        PhasePoint(w2, solve_eoc_point(w2, act)) for w2 in p["w2_list"]
    )
    spec = SweepSpec(
        points=points, depth=p["depth"], width=p["width"],
        activation=p["activation"],
        train_config=TrainConfig(
            learning_rate=p["learning_rate"], batch_size=p["batch_size"],
            momentum=p["momentum"], epochs=p["epochs"],
        ),
        seeds=tuple(p["seeds"]), train_subset=p["train_subset"],
        test_subset=p["test_subset"],
    )
    result = run_eoc_sweep(
        spec, load_mnist(p["data_dir"], "train"), load_mnist(p["data_dir"], "test"),
        n_workers=p["threads"],
    )
    _sweep_outputs(p, result, "sweep-eoc")
    return 0


def _cmd_sweep_depth(parser, args) -> int:
    defaults = {"w2_list": None, "sigma_b2": 0.05, "depths": None,
                **_sweep_common_defaults()}
    p = _merge(args, _cfg(args, "sweep-depth"), defaults)
    _require(parser, p, ["w2_list", "depths"])
    points = tuple(PhasePoint(w2, p["sigma_b2"]) for w2 in p["w2_list"])
    spec = SweepSpec(
        points=points, depth=max(p["depths"]), width=p["width"],
        activation="tanh",
        train_config=TrainConfig(
            learning_rate=p["learning_rate"], batch_size=p["batch_size"],
            momentum=p["momentum"], epochs=p["epochs"],
        ),
        seeds=tuple(p["seeds"]), train_subset=p["train_subset"],
        test_subset=p["test_subset"], depths=tuple(p["depths"]),
    )
    result = run_depth_sweep(
        spec, load_mnist(p["data_dir"], "train"), load_mnist(p["data_dir"], "test"),
        n_workers=p["threads"],
    )
    _sweep_outputs(p, result, "sweep-depth")
    return 0


def _cmd_sweep_threshold(parser, args) -> int:
    defaults = {
        "depth": 1, "b2_list": [0.0, 0.5, 1.0, 1.5],
        "w2_from": 1.0, "w2_to": 40.0, "w2_points": 16,
        **_sweep_common_defaults(),
    }
    defaults.update({"width": 8, "epochs": 10})
    p = _merge(args, _cfg(args, "sweep-threshold"), defaults)
    axis = np.geomspace(p["w2_from"], p["w2_to"], p["w2_points"]).tolist()
    result = run_threshold_sweep(
        depth=p["depth"], width=p["width"], sigma_b2_list=p["b2_list"],
        sigma_w2_axis=axis, seeds=p["seeds"],
        train_set=load_mnist(p["data_dir"], "train"),
        test_set=load_mnist(p["data_dir"], "test"),
        train_config=TrainConfig(
            learning_rate=p["learning_rate"], batch_size=p["batch_size"],
            momentum=p["momentum"], epochs=p["epochs"],
        ),
        train_subset=p["train_subset"], test_subset=p["test_subset"],
        n_workers=p["threads"],
    )
    if p["out"]:
        _write_json(p["out"], p, result.to_dict(volatile=False))
    if p["csv"]:
        rows = []
        for b2, table in result.tables.items():
            rows.extend((b2, w, m, s) for w, m, s in table)
        _write_csv(
            p["csv"], ["sigma_b2", "sigma_w2", "mean_accuracy", "std_accuracy"],
            rows, p,
        )
    fitted = {
        b2: (f.threshold if f is not None else None)
        for b2, f in result.fits.items()
    }
    print(f"sweep-threshold: fitted thresholds {fitted}")
    return 0


def _cmd_fit_threshold(parser, args) -> int:
    defaults = {"input": None, "bootstrap": 200, "bootstrap_seed": 0, "out": None}
    p = _merge(args, _cfg(args, "fit-threshold"), defaults)
    _require(parser, p, ["input"])
    rows = []
    for line in Path(p["input"]).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line[0].isalpha():
            continue
        w2, acc, std = line.split(",")[:3]
        rows.append((float(w2), float(acc), float(std)))
    fit = fit_threshold(rows, bootstrap=p["bootstrap"],
                        bootstrap_seed=p["bootstrap_seed"])
    result = {
        "a_max": fit.a_max, "rate": fit.rate, "threshold": fit.threshold,
        "a_max_se": fit.a_max_se, "rate_se": fit.rate_se,
        "threshold_se": fit.threshold_se,
    }
    if p["out"]:
        _write_json(p["out"], p, result)
    print(
        f"fit-threshold: threshold = {_fmt(fit.threshold)} "
        f"+- {_fmt(fit.threshold_se)}"
    )
    return 0


def _cmd_stats(parser, args) -> int:
    defaults = {"data_dir": None, "split": "train", "out": None}
    p = _merge(args, _cfg(args, "stats"), defaults)
    stats = compute_stats(load_mnist(p["data_dir"], p["split"]))
    result = {
        "input_variance": stats.input_variance,
        "input_mean_sq": stats.input_mean_sq,
    }
    if p["out"]:
        _write_json(p["out"], p, result)
    print(
        f"stats: sigma_0^2 = {_fmt(stats.input_variance)}, "
        f"mu_0^2 = {_fmt(stats.input_mean_sq)} ({p['split']} split)"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser assembly and dispatch
# ---------------------------------------------------------------------------

def _cfg(args: argparse.Namespace, subcommand: str) -> dict:
    if getattr(args, "config", None):
        return _load_config(args.config, subcommand)
    return {}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edge-atlas",
        description="Phase structure of deep tanh/swish network initializations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, setup):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run-configuration file")
        setup(sp)
        sp.set_defaults(handler=handler, subparser=sp)

    def float_arg(sp, *names, **kw):
        for n in names:
            sp.add_argument(n, type=float, **kw)

    def int_arg(sp, *names, **kw):
        for n in names:
            sp.add_argument(n, type=int, **kw)

    add("lou", _cmd_lou, lambda sp: (
        float_arg(sp, "--sigma-w2", dest="sigma_w2"),
        float_arg(sp, "--from", dest="from"),
        float_arg(sp, "--to", dest="to"),
        int_arg(sp, "--points"),
        sp.add_argument("--out"),
    ))
    add("eoc", _cmd_eoc, lambda sp: (
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        float_arg(sp, "--from", dest="from"),
        float_arg(sp, "--to", dest="to"),
        int_arg(sp, "--points"),
        sp.add_argument("--spacing", choices=["uniform", "anchor"]),
        sp.add_argument("--out"),
    ))
    add("fixed-point", _cmd_fixed_point, lambda sp: (
        float_arg(sp, "--sigma-w2", dest="sigma_w2"),
        float_arg(sp, "--sigma-b2", dest="sigma_b2"),
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        float_arg(sp, "--seed-variance", dest="seed_variance"),
        sp.add_argument("--out"),
    ))
    add("phase-grid", _cmd_phase_grid, lambda sp: (
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        float_arg(sp, "--w-from", dest="w_from"),
        float_arg(sp, "--w-to", dest="w_to"),
        int_arg(sp, "--w-points", dest="w_points"),
        float_arg(sp, "--b-from", dest="b_from"),
        float_arg(sp, "--b-to", dest="b_to"),
        int_arg(sp, "--b-points", dest="b_points"),
        sp.add_argument("--out"),
    ))
    add("intersect", _cmd_intersect, lambda sp: (
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        sp.add_argument("--out"),
    ))
    add("post-evol", _cmd_post_evol, lambda sp: (
        float_arg(sp, "--sigma-w2", dest="sigma_w2"),
        float_arg(sp, "--sigma-b2", dest="sigma_b2"),
        sp.add_argument("--sigma1", type=_floats),
        int_arg(sp, "--depth", "--width", "--samples", "--seed", "--bins"),
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        sp.add_argument("--out"),
    ))
    add("train", _cmd_train, lambda sp: (
        float_arg(sp, "--sigma-w2", dest="sigma_w2"),
        float_arg(sp, "--sigma-b2", dest="sigma_b2"),
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        int_arg(sp, "--depth", "--width", "--epochs", "--batch-size",
                "--seed", "--train-subset", "--test-subset"),
        float_arg(sp, "--learning-rate", dest="learning_rate"),
        float_arg(sp, "--momentum"),
        sp.add_argument("--data-dir", dest="data_dir"),
        sp.add_argument("--out"),
    ))

    def sweep_common(sp):
        int_arg(sp, "--width", "--epochs", "--batch-size",
                "--train-subset", "--test-subset", "--threads")
        float_arg(sp, "--learning-rate", dest="learning_rate")
        float_arg(sp, "--momentum")
        sp.add_argument("--seeds", type=_ints)
        sp.add_argument("--data-dir", dest="data_dir")
        sp.add_argument("--out")
        sp.add_argument("--csv")

    add("sweep-eoc", _cmd_sweep_eoc, lambda sp: (
        sp.add_argument("--activation", choices=["tanh", "swish"]),
        sp.add_argument("--w2-list", dest="w2_list", type=_floats),
        int_arg(sp, "--depth"),
        sweep_common(sp),
    ))
    add("sweep-depth", _cmd_sweep_depth, lambda sp: (
        sp.add_argument("--w2-list", dest="w2_list", type=_floats),
        float_arg(sp, "--sigma-b2", dest="sigma_b2"),
        sp.add_argument("--depths", type=_ints),
        sweep_common(sp),
    ))
    add("sweep-threshold", _cmd_sweep_threshold, lambda sp: (
        int_arg(sp, "--depth"),
        sp.add_argument("--b2-list", dest="b2_list", type=_floats),
        float_arg(sp, "--w2-from", dest="w2_from"),
        float_arg(sp, "--w2-to", dest="w2_to"),
        int_arg(sp, "--w2-points", dest="w2_points"),
        sweep_common(sp),
    ))
    add("fit-threshold", _cmd_fit_threshold, lambda sp: (
        sp.add_argument("--in", dest="input"),
        int_arg(sp, "--bootstrap", "--bootstrap-seed"),
        sp.add_argument("--out"),
    ))
    add("stats", _cmd_stats, lambda sp: (
        sp.add_argument("--data-dir", dest="data_dir"),
        sp.add_argument("--split", choices=["train", "test"]),
        sp.add_argument("--out"),
    ))
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args.subparser, args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except EdgeAtlasError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"error": "missing-file", "message": str(exc)}), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
