"""Desk-scale experiment orchestration with reproducible provenance.

The four experiment families: post-activation evolution through depth,
accuracy along the critical line, the (depth, sigma_w^2) accuracy grid,
and small-network saturation-threshold sweeps. Full-scale versions of
these runs need hours; the desk-scale defaults here (width 64, a few
epochs, 10k training subset, a handful of seeds) preserve the qualitative
orderings and finish in minutes.

Every sweep derives its per-run RNG streams from (seed value, cell
index), so results do not depend on scheduling, and embeds a config hash
plus code version so a result can be regenerated exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import ks_2samp

from . import __version__
from .datasets import ImageSet, subset
from .errors import DomainError, TrainingDivergedError
from .fitting import ThresholdFit, fit_threshold
from .gaussian_calculus import Activation, get_activation
from .network import NetworkConfig, TrainConfig, init_network, forward, train
from .phase_map import PhasePoint

__all__ = [
    "SweepSpec",
    "RunSummary",
    "SweepResult",
    "PostEvolution",
    "ThresholdSweepResult",
    "run_post_evolution",
    "run_eoc_sweep",
    "run_depth_sweep",
    "run_threshold_sweep",
    "pooled_std",
]

# desk-scale defaults shared by the sweeps and the CLI
DESK_WIDTH = 64
DESK_DEPTH = 20
DESK_TRAIN_SUBSET = 10_000
DESK_TEST_SUBSET = 2_000
DESK_SEEDS = (11, 22, 33, 44, 55)


def pooled_std(stds: Sequence[float]) -> float:
    """Square root of the mean per-point seed variance."""
    arr = np.asarray(list(stds), dtype=np.float64)
    return float(np.sqrt(np.nanmean(arr**2)))


@dataclass(frozen=True)
class SweepSpec:
    """What to run: phase points, network shape, training setup, seeds."""

    points: Tuple[PhasePoint, ...]
    depth: int = DESK_DEPTH
    width: int = DESK_WIDTH
    activation: str = "tanh"
    train_config: TrainConfig = field(default_factory=TrainConfig)
    seeds: Tuple[int, ...] = DESK_SEEDS
    train_subset: int = DESK_TRAIN_SUBSET
    test_subset: int = DESK_TEST_SUBSET
    subset_seed: int = 0
    depths: Optional[Tuple[int, ...]] = None  # depth-sweep axis

    def __post_init__(self):
        if not self.points or not self.seeds:
            raise DomainError("points and seeds must be non-empty")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.depths is not None:
            object.__setattr__(self, "depths", tuple(int(d) for d in self.depths))

    def to_dict(self) -> dict:
        return {
            "points": [[p.sigma_w2, p.sigma_b2] for p in self.points],
            "depth": self.depth,
            "width": self.width,
            "activation": self.activation,
            "train_config": {
                "learning_rate": self.train_config.learning_rate,
                "batch_size": self.train_config.batch_size,
                "momentum": self.train_config.momentum,
                "epochs": self.train_config.epochs,
                "rng_seed": self.train_config.rng_seed,
            },
            "seeds": list(self.seeds),
            "train_subset": self.train_subset,
            "test_subset": self.test_subset,
            "subset_seed": self.subset_seed,
            "depths": list(self.depths) if self.depths is not None else None,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class RunSummary:
    """Outcome of one (cell, seed) training run; accuracies are NaN when
    the run diverged."""

    sigma_w2: float
    sigma_b2: float
    depth: int
    seed: int
    test_accuracy: float
    train_accuracy: float
    train_loss: float
    test_accuracy_per_epoch: Tuple[float, ...]
    diverged: bool

    def to_dict(self) -> dict:
        return {
            "sigma_w2": self.sigma_w2,
            "sigma_b2": self.sigma_b2,
            "depth": self.depth,
            "seed": self.seed,
            "test_accuracy": self.test_accuracy,
            "train_accuracy": self.train_accuracy,
            "train_loss": self.train_loss,
            "test_accuracy_per_epoch": list(self.test_accuracy_per_epoch),
            "diverged": self.diverged,
        }


@dataclass(frozen=True)
class SweepResult:
    """Per-run records, per-cell aggregates, and provenance.

    Aggregates are keyed (depth, sigma_w2, sigma_b2); each holds the mean
    and the over-seeds standard deviation of the final test accuracy,
    ignoring diverged runs, plus the run counts. created_at is the only
    non-reproducible field and is excluded from deterministic output.
    """

    spec: SweepSpec
    runs: Tuple[RunSummary, ...]
    config_hash: str
    code_version: str
    created_at: str

    def cells(self) -> List[Tuple[int, float, float]]:
        seen = []
        for r in self.runs:
            key = (r.depth, r.sigma_w2, r.sigma_b2)
            if key not in seen:
                seen.append(key)
        return seen

    def aggregate(self) -> Dict[Tuple[int, float, float], dict]:
        out: Dict[Tuple[int, float, float], dict] = {}
        for key in self.cells():
            accs = [
                r.test_accuracy
                for r in self.runs
                if (r.depth, r.sigma_w2, r.sigma_b2) == key and not r.diverged
            ]
            n_total = sum(
                1 for r in self.runs if (r.depth, r.sigma_w2, r.sigma_b2) == key
            )
            out[key] = {
                "mean": float(np.mean(accs)) if accs else float("nan"),
                "std": float(np.std(accs, ddof=1)) if len(accs) > 1 else float("nan"),
                "n_runs": n_total,
                "n_converged": len(accs),
            }
        return out

    def to_dict(self, volatile: bool = True) -> dict:
        d = {
            "spec": self.spec.to_dict(),
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "runs": [r.to_dict() for r in self.runs],
            "aggregates": [
                {
                    "depth": k[0],
                    "sigma_w2": k[1],
                    "sigma_b2": k[2],
                    **v,
                }
                for k, v in self.aggregate().items()
            ],
        }
        if volatile:
            d["created_at"] = self.created_at
        return d


# ---------------------------------------------------------------------------
# Single runs and the worker pool
# ---------------------------------------------------------------------------

def _derive_seeds(seed: int, cell_index: int) -> Tuple[int, int]:
    """Independent (init, shuffle) streams for one run, scheduling-free."""
    state = np.random.SeedSequence([seed, cell_index]).generate_state(2)
    return int(state[0]), int(state[1])


def _run_cell(
    point: PhasePoint,
    depth: int,
    spec: SweepSpec,
    seed: int,
    cell_index: int,
    train_set: ImageSet,
    test_set: ImageSet,
) -> RunSummary:
    init_seed, shuffle_seed = _derive_seeds(seed, cell_index)
    act = get_activation(spec.activation)
    net = init_network(
        NetworkConfig(
            depth=depth,
            width=spec.width,
            input_dim=train_set.images.shape[1],
            output_dim=int(train_set.labels.max()) + 1,
            activation=act,
            init=point,
            seed=init_seed,
        )
    )
    tcfg = replace(spec.train_config, rng_seed=shuffle_seed)
    try:
        record = train(net, train_set, test_set, tcfg)
        return RunSummary(
            sigma_w2=point.sigma_w2,
            sigma_b2=point.sigma_b2,
            depth=depth,
            seed=seed,
            test_accuracy=record.test_accuracy[-1],
            train_accuracy=record.train_accuracy[-1],
            train_loss=record.train_loss[-1],
            test_accuracy_per_epoch=tuple(record.test_accuracy),
            diverged=False,
        )
    except TrainingDivergedError:
        return RunSummary(
            sigma_w2=point.sigma_w2,
            sigma_b2=point.sigma_b2,
            depth=depth,
            seed=seed,
            test_accuracy=float("nan"),
            train_accuracy=float("nan"),
            train_loss=float("nan"),
            test_accuracy_per_epoch=(),
            diverged=True,
        )


_POOL_DATA: dict = {}


def _pool_init(train_set: ImageSet, test_set: ImageSet) -> None:
    _POOL_DATA["train"] = train_set
    _POOL_DATA["test"] = test_set


def _pool_task(args) -> RunSummary:
    point, depth, spec, seed, cell_index = args
    return _run_cell(
        point, depth, spec, seed, cell_index,
        _POOL_DATA["train"], _POOL_DATA["test"],
    )


def _execute(
    tasks: List[tuple],
    train_set: ImageSet,
    test_set: ImageSet,
    n_workers: int,
) -> List[RunSummary]:
    if n_workers <= 1:
        return [
            _run_cell(point, depth, spec, seed, idx, train_set, test_set)
            for point, depth, spec, seed, idx in tasks
        ]
    with ProcessPoolExecutor(
        max_workers=n_workers,
        initializer=_pool_init,
        initargs=(train_set, test_set),
    ) as pool:
        return list(pool.map(_pool_task, tasks))


def _subsets(
    spec: SweepSpec, train_set: ImageSet, test_set: ImageSet
) -> Tuple[ImageSet, ImageSet]:
    tr = (
        subset(train_set, spec.train_subset, spec.subset_seed)
        if spec.train_subset < len(train_set)
        else train_set
    )
    te = (
        subset(test_set, spec.test_subset, spec.subset_seed + 1)
        if spec.test_subset < len(test_set)
        else test_set
    )
    return tr, te


def _build_result(spec: SweepSpec, runs: List[RunSummary]) -> SweepResult:
    return SweepResult(
        spec=spec,
        runs=tuple(runs),
        config_hash=spec.config_hash(),
        code_version=__version__,
        created_at=datetime.now(timezone.utc).isoformat(),
    )


# ---------------------------------------------------------------------------
# Experiment families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PostEvolution:
    """Per-layer post-activation samples for several first-layer variances.

    samples[sigma1][layer] pools the post-activations of every neuron and
    every input at that layer (layer index 0 is the first hidden layer).
    """

    point: PhasePoint
    sigma1_values: Tuple[float, ...]
    samples: Dict[float, List[np.ndarray]]

    def histogram(self, sigma1: float, layer: int, bins: int = 100):
        return np.histogram(self.samples[sigma1][layer], bins=bins, density=True)

    def layer_variance(self, sigma1: float, layer: int) -> float:
        return float(np.var(self.samples[sigma1][layer]))

    def tail_mass(self, sigma1: float, layer: int, cut: float = 0.9) -> float:
        s = self.samples[sigma1][layer]
        return float(np.mean(np.abs(s) > cut))

    def ks_distance(self, sigma1_a: float, sigma1_b: float, layer: int) -> float:
        return float(
            ks_2samp(self.samples[sigma1_a][layer], self.samples[sigma1_b][layer]).statistic
        )


def run_post_evolution(
    point: PhasePoint,
    sigma1_list: Sequence[float],
    depth: int = 30,
    width: int = 512,
    n_samples: int = 128,
    act: Activation | str = "tanh",
    seed: int = 0,
) -> PostEvolution:
    """Forward synthetic Gaussian batches and record the post-activation
    distribution at every layer.

    Inputs are scaled so the first hidden layer has the requested
    variance: x ~ N(0, (sigma_1^2 - sigma_b^2)/sigma_w^2) elementwise
    gives E[z_1^2] = sigma_1^2. The same network (same seed) is used for
    every sigma_1^2 so the comparison isolates the input scaling.
    """
    if isinstance(act, str):
        act = get_activation(act)
    if point.sigma_w2 <= 0.0:
        raise DomainError("sigma_w2 must be positive to set the input scale")
    net = init_network(
        NetworkConfig(
            depth=depth,
            width=width,
            input_dim=width,
            output_dim=1,
            activation=act,
            init=point,
            seed=seed,
        )
    )
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9E3779B9]))
    base = rng.standard_normal((n_samples, width))
    samples: Dict[float, List[np.ndarray]] = {}
    for s1 in sigma1_list:
        s1 = float(s1)
        scale2 = (s1 - point.sigma_b2) / point.sigma_w2
        if scale2 <= 0.0:
            raise DomainError(
                f"sigma_1^2 = {s1} not reachable: must exceed sigma_b^2"
            )
        cache = forward(net, base * math.sqrt(scale2))
        samples[s1] = [h.ravel().copy() for h in cache.post_activations]
    return PostEvolution(
        point=point,
        sigma1_values=tuple(float(s) for s in sigma1_list),
        samples=samples,
    )


def run_eoc_sweep(
    spec: SweepSpec,
    train_set: ImageSet,
    test_set: ImageSet,
    n_workers: int = 1,
) -> SweepResult:
    """Train one network per (critical point, seed) and aggregate.

    The caller supplies points on the computed critical line (this
    function does not re-derive them). Diverged runs are recorded with
    NaN accuracy, never fatal.
    """
    tr, te = _subsets(spec, train_set, test_set)
    tasks = [
        (point, spec.depth, spec, seed, cell)
        for cell, (point, seed) in enumerate(
            (p, s) for p in spec.points for s in spec.seeds
        )
    ]
    return _build_result(spec, _execute(tasks, tr, te, n_workers))


def run_depth_sweep(
    spec: SweepSpec,
    train_set: ImageSet,
    test_set: ImageSet,
    n_workers: int = 1,
) -> SweepResult:
    """Accuracy over the (depth, sigma_w^2) grid at fixed sigma_b^2.

    spec.depths carries the depth axis; spec.points the weight-variance
    axis (all points share the bias variance).
    """
    if not spec.depths:
        raise DomainError("spec.depths must be set for a depth sweep")
    b2s = {p.sigma_b2 for p in spec.points}
    if len(b2s) != 1:
        raise DomainError("depth sweep expects one shared sigma_b2")
    tr, te = _subsets(spec, train_set, test_set)
    tasks = [
        (point, depth, spec, seed, cell)
        for cell, (depth, point, seed) in enumerate(
            (d, p, s) for d in spec.depths for p in spec.points for s in spec.seeds
        )
    ]
    return _build_result(spec, _execute(tasks, tr, te, n_workers))


@dataclass(frozen=True)
class ThresholdSweepResult:
    """Hinge fits per bias variance plus the accuracy tables behind them.

    fits[sigma_b2] is None when the fit degenerated; the diagnostic
    message is kept in failures[sigma_b2]. tables[sigma_b2] rows are
    (sigma_w2, mean accuracy, std over seeds).
    """

    sweep: SweepResult
    sigma_b2_values: Tuple[float, ...]
    tables: Dict[float, List[Tuple[float, float, float]]]
    fits: Dict[float, Optional[ThresholdFit]]
    failures: Dict[float, str]

    def to_dict(self, volatile: bool = True) -> dict:
        return {
            "sweep": self.sweep.to_dict(volatile=volatile),
            "fits": {
                str(b2): (
                    None
                    if fit is None
                    else {
                        "a_max": fit.a_max,
                        "rate": fit.rate,
                        "threshold": fit.threshold,
                        "a_max_se": fit.a_max_se,
                        "rate_se": fit.rate_se,
                        "threshold_se": fit.threshold_se,
                    }
                )
                for b2, fit in self.fits.items()
            },
            "failures": {str(k): v for k, v in self.failures.items()},
        }


def run_threshold_sweep(
    depth: int,
    width: int,
    sigma_b2_list: Sequence[float],
    sigma_w2_axis: Sequence[float],
    seeds: Sequence[int],
    train_set: ImageSet,
    test_set: ImageSet,
    train_config: TrainConfig | None = None,
    train_subset: int = DESK_TRAIN_SUBSET,
    test_subset: int = DESK_TEST_SUBSET,
    subset_seed: int = 0,
    n_workers: int = 1,
) -> ThresholdSweepResult:
    """Accuracy over a sigma_w^2 axis for each sigma_b^2, plus hinge fits.

    Small networks only make sense here (the saturation threshold is a
    narrow-network effect); the shipped defaults follow width 8, depth 1
    or 2. Degenerate fits are reported per sigma_b^2 without aborting.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    tcfg = train_config or TrainConfig(epochs=10)
    points = tuple(
        PhasePoint(float(w2), float(b2))
        for b2 in sigma_b2_list
        for w2 in sigma_w2_axis
    )
    spec = SweepSpec(
        points=points,
        depth=depth,
        width=width,
        activation="tanh",
        train_config=tcfg,
        seeds=tuple(seeds),
        train_subset=train_subset,
        test_subset=test_subset,
        subset_seed=subset_seed,
    )
    tr, te = _subsets(spec, train_set, test_set)
    tasks = [
        (point, depth, spec, seed, cell)
        for cell, (point, seed) in enumerate(
            (p, s) for p in spec.points for s in spec.seeds
        )
    ]
    runs = _execute(tasks, tr, te, n_workers)
    sweep = _build_result(spec, runs)

    agg = sweep.aggregate()
    tables: Dict[float, List[Tuple[float, float, float]]] = {}
    fits: Dict[float, Optional[ThresholdFit]] = {}
    failures: Dict[float, str] = {}
    for b2 in sigma_b2_list:
        b2 = float(b2)
        rows = []
        for w2 in sigma_w2_axis:
            cell = agg[(depth, float(w2), b2)]
            rows.append((float(w2), cell["mean"], cell["std"]))
        tables[b2] = rows
        try:
            fits[b2] = fit_threshold(
                (w, m, max(s, 1e-3)) for w, m, s in rows if math.isfinite(m)
            )
        except Exception as exc:  # degenerate fits reported, not fatal
            fits[b2] = None
            failures[b2] = str(exc)
    return ThresholdSweepResult(
        sweep=sweep,
        sigma_b2_values=tuple(float(b) for b in sigma_b2_list),
        tables=tables,
        fits=fits,
        failures=failures,
    )
