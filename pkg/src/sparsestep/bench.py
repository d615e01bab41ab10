"""Experiment harness: recovery phase grids and stability/runtime curves,
plus the two reference backward implementations used only for comparison.

Grids derive one seed per (cell, trial) work unit, so results do not depend
on execution order.  Success means exact support recovery.  CSV files are the
durable output format; heatmap rendering is an optional layer on top.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    ConfigError,
    InvalidConfig,
    InvalidSparsity,
    NumericalBreakdown,
    RankDeficient,
)
from .greedy import (
    _finalize,
    backward_regression,
    forward_regression,
    lace,
    omp,
)
from .linalg import qr_delete_thin, qr_init
from .model import ActiveSet, Dictionary, RecoveryOutcome
from .synth import InstanceSpec, instance_seed, make_instance
from .two_stage import SrrConfig, ompr, srr, subspace_pursuit


@dataclass
class PhaseGrid:
    """Empirical recovery frequencies over a 2-d difficulty grid."""

    axis1_name: str
    axis1: list
    axis2_name: str
    axis2: list
    algorithms: list
    successes: dict = field(default_factory=dict)
    frequencies: dict = field(default_factory=dict)
    trials: int = 0
    base_seed: int = 0

    def frequency(self, algorithm: str, i: int, j: int) -> float:
        return float(self.frequencies[algorithm][i, j])


@dataclass
class StabilityCurve:
    """Median runtime and solution error per problem size per algorithm."""

    sizes: list
    runtimes: dict
    errors: dict


# ---------------------------------------------------------------------------
# reference implementations


def naive_br(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Backward elimination evaluating every deletion the slow way.

    Each candidate deletion is scored by actually removing the column from
    the factorization and solving the reduced system, which costs a full
    factorization update per candidate per step.  Kept as the correctness
    oracle and runtime baseline for the closed-form deletion scores.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    n, m = dictionary.n, dictionary.m
    if k < 0 or k >= m:
        raise InvalidSparsity(f"backward sparsity must satisfy 0 <= k < {m}")
    if m > n:
        raise RankDeficient("backward elimination needs full column rank")
    qr = qr_init(dictionary.data, range(m))
    while qr.p > k:
        p = qr.p
        resids = np.empty(p)
        for pos in range(p):
            if p == 1:
                resids[pos] = np.linalg.norm(y)
                continue
            q2, r2 = qr_delete_thin(qr.q, qr.r, pos)
            w = q2.T @ y
            solve_triangular(r2, w, lower=False, check_finite=False)
            resids[pos] = np.linalg.norm(y - q2 @ w)
        hits = np.flatnonzero(resids == resids.min())
        ids = np.asarray(qr.col_ids)
        pos = int(hits[np.argmin(ids[hits])])
        qr.remove_column(qr.col_ids[pos])
    return _finalize(dictionary, qr.col_ids, y, m - k, qr.update_count)


def normal_br(dictionary: Dictionary, y, k: int) -> RecoveryOutcome:
    """Backward elimination on the normal equations with rank-one downdates.

    Maintains the inverse Gram matrix explicitly and shrinks it by Schur
    complements as atoms are deleted.  Recursive updates of the squared
    system amplify conditioning errors, so this exists purely as the
    unstable comparator; its coefficients come from the maintained inverse,
    not from a fresh refit.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    n, m = dictionary.n, dictionary.m
    if k < 0 or k >= m:
        raise InvalidSparsity(f"backward sparsity must satisfy 0 <= k < {m}")
    if m > n:
        raise RankDeficient("backward elimination needs full column rank")
    data = dictionary.data
    ids = list(range(m))
    gram = data.T @ data
    try:
        inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as err:
        raise NumericalBreakdown("Gram matrix is singular") from err
    proj = data.T @ y

    while len(ids) > k:
        gamma = np.diag(inv).copy()
        if gamma.min() <= 0.0:
            raise NumericalBreakdown(
                "maintained inverse lost positive diagonals"
            )
        x = inv @ proj
        scores = x * x / gamma
        hits = np.flatnonzero(scores == scores.min())
        pos = int(hits[np.argmin(np.asarray(ids)[hits])])
        keep = [i for i in range(len(ids)) if i != pos]
        col = inv[keep, pos]
        inv = inv[np.ix_(keep, keep)] - np.outer(col, col) / inv[pos, pos]
        ids.pop(pos)
        proj = proj[keep]

    if ids:
        gamma = np.diag(inv)
        if gamma.min() <= 0.0:
            raise NumericalBreakdown(
                "maintained inverse lost positive diagonals"
            )
        x = inv @ proj
        order = np.argsort(ids)
        ids = [ids[i] for i in order]
        x = x[order]
        resid = float(np.linalg.norm(y - data[:, ids] @ x))
    else:
        x = np.empty(0)
        resid = float(np.linalg.norm(y))
    return RecoveryOutcome(
        active_set=ActiveSet(ids),
        coefficients=x,
        residual_norm=resid,
        iterations=m - k,
    )


# ---------------------------------------------------------------------------
# configuration

CONFIG_KEYS = {
    "n",
    "m",
    "k",
    "s",
    "sigma_min_list",
    "delta_list",
    "k_list",
    "trials",
    "seed",
    "algorithms",
    "condition_number",
    "sizes",
}

_INT_KEYS = {"n", "m", "k", "s", "trials", "seed"}
_FLOAT_KEYS = {"condition_number"}
_FLOAT_LIST_KEYS = {"sigma_min_list", "delta_list"}
_INT_LIST_KEYS = {"k_list", "sizes"}

GRID_ALGORITHMS = ("fr", "br", "omp", "lace", "sp", "ompr", "srr", "srr_k")
STABILITY_ALGORITHMS = ("br", "naive_br", "normal_br", "lace")


def load_config(path) -> dict:
    """Parse a flat key=value config file.

    Lists are comma separated; ``#`` starts a comment.  Unknown keys are
    rejected so typos fail loudly.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    config = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                config[key] = int(value)
            elif key in _FLOAT_KEYS:
                config[key] = float(value)
            elif key in _FLOAT_LIST_KEYS:
                config[key] = [float(v) for v in value.split(",")]
            elif key in _INT_LIST_KEYS:
                config[key] = [int(v) for v in value.split(",")]
            else:
                config[key] = [v.strip() for v in value.split(",")]
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: {err}") from None
    return config


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config is missing required key {key!r}")
    return config[key]


def _make_runner(name: str, k: int, s: int):
    """Bind an algorithm name from a config to a callable of (dict, y)."""
    if name == "br":
        return lambda d, y: backward_regression(d, y, k)
    if name == "lace":
        return lambda d, y: lace(d, y, k)
    if name == "fr":
        return lambda d, y: forward_regression(d, y, k)
    if name == "omp":
        return lambda d, y: omp(d, y, k)
    if name == "sp":
        return lambda d, y: subspace_pursuit(d, y, k)
    if name == "ompr":
        return lambda d, y: ompr(d, y, k, s=s)
    if name == "srr":
        return lambda d, y: srr(d, y, SrrConfig(k=k, s=s))
    if name == "srr_k":
        return lambda d, y: srr(d, y, SrrConfig(k=k, s=k))
    raise ConfigError(f"unknown algorithm {name!r}")


def run_phase_grid(config: dict) -> PhaseGrid:
    """Measure exact-support recovery frequency over a difficulty grid.

    Two grid layouts are supported.  With ``delta_list`` the axes are
    (sigma_min, delta) at fixed sparsity ``k``.  With ``k_list`` the axes are
    (k, sigma_min) at fixed noise (``delta_list`` may hold a single value,
    default 0).  Every (cell, trial) pair derives its own instance seed, and
    all algorithms see the same instances.
    """
    n = _require(config, "n")
    m = _require(config, "m")
    trials = _require(config, "trials")
    base_seed = config.get("seed", 0)
    algorithms = config.get("algorithms")
    if not algorithms:
        raise ConfigError("config is missing required key 'algorithms'")
    for name in algorithms:
        if name not in GRID_ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r}")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    sigma_list = _require(config, "sigma_min_list")
    if any(not 0.0 < s <= 1.0 for s in sigma_list):
        raise ConfigError("sigma_min values must lie in (0, 1]")
    s_step = config.get("s", 1)

    if "k_list" in config:
        k_list = config["k_list"]
        if "k" in config:
            raise ConfigError("give either 'k' or 'k_list', not both")
        deltas = config.get("delta_list", [0.0])
        if len(deltas) != 1:
            raise ConfigError(
                "sparsity-axis grids take a single delta value"
            )
        delta = deltas[0]
        if delta < 0.0:
            raise ConfigError("delta must be nonnegative")
        if any(not 1 <= k <= min(n, m) for k in k_list):
            raise ConfigError("k values must lie in 1..min(n, m)")
        axis1_name, axis1 = "k", list(k_list)
        axis2_name, axis2 = "sigma_min", list(sigma_list)
        cells = [
            (k, sigma, delta) for k in k_list for sigma in sigma_list
        ]
    else:
        k = _require(config, "k")
        if not 1 <= k <= min(n, m):
            raise ConfigError("k must lie in 1..min(n, m)")
        delta_list = _require(config, "delta_list")
        if any(d < 0.0 for d in delta_list):
            raise ConfigError("delta values must be nonnegative")
        axis1_name, axis1 = "sigma_min", list(sigma_list)
        axis2_name, axis2 = "delta", list(delta_list)
        cells = [
            (k, sigma, delta) for sigma in sigma_list for delta in delta_list
        ]

    for k_cell, _, _ in cells:
        if "sp" in algorithms and 2 * k_cell > n:
            raise ConfigError(f"subspace pursuit needs 2k <= n, got k={k_cell}")
        if "srr_k" in algorithms and 2 * k_cell > n:
            raise ConfigError(f"srr_k needs 2k <= n, got k={k_cell}")
        if "srr" in algorithms and k_cell + s_step > n:
            raise ConfigError(f"srr needs k + s <= n, got k={k_cell}, s={s_step}")
        if ("srr" in algorithms or "ompr" in algorithms) and s_step > k_cell:
            raise ConfigError(f"step s={s_step} exceeds sparsity k={k_cell}")

    shape = (len(axis1), len(axis2))
    successes = {name: np.zeros(shape, dtype=int) for name in algorithms}
    for idx, (k_cell, sigma, delta) in enumerate(cells):
        i, j = divmod(idx, shape[1])
        runners = {
            name: _make_runner(name, k_cell, s_step) for name in algorithms
        }
        for trial in range(trials):
            spec = InstanceSpec(
                n=n,
                m=m,
                k=k_cell,
                sigma_min=sigma,
                delta=delta,
                seed=instance_seed(base_seed, i, j, trial),
            )
            instance = make_instance(spec)
            truth = instance.signal.support
            for name, run in runners.items():
                try:
                    outcome = run(instance.dictionary, instance.y)
                except (RankDeficient, NumericalBreakdown, InvalidConfig):
                    continue
                if outcome.active_set.sorted() == truth:
                    successes[name][i, j] += 1

    frequencies = {
        name: successes[name] / float(trials) for name in algorithms
    }
    return PhaseGrid(
        axis1_name=axis1_name,
        axis1=axis1,
        axis2_name=axis2_name,
        axis2=axis2,
        algorithms=list(algorithms),
        successes=successes,
        frequencies=frequencies,
        trials=trials,
        base_seed=base_seed,
    )


_STABILITY_RUNNERS = {
    "br": backward_regression,
    "naive_br": naive_br,
    "normal_br": normal_br,
    "lace": lace,
}


def run_stability(config: dict) -> StabilityCurve:
    """Benchmark the backward implementations on ill-conditioned squares.

    For each size m the dictionary is m x m with singular values spread from
    1/condition_number to 1, the planted signal is k-sparse and noiseless.
    Each algorithm is warmed up once, then timed on ``trials`` fresh
    instances; medians of wall-clock time and of the coefficient error
    against the planted signal are recorded.
    """
    sizes = _require(config, "sizes")
    if sorted(sizes) != list(sizes) or len(set(sizes)) != len(sizes):
        raise ConfigError("sizes must be strictly increasing")
    cond = config.get("condition_number", 1e8)
    if cond < 1.0:
        raise ConfigError("condition_number must be at least 1")
    k = config.get("k", 16)
    trials = config.get("trials", 5)
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    base_seed = config.get("seed", 0)
    algorithms = config.get("algorithms", list(STABILITY_ALGORITHMS))
    for name in algorithms:
        if name not in _STABILITY_RUNNERS:
            raise ConfigError(f"unknown stability algorithm {name!r}")
    if any(k >= size for size in sizes):
        raise ConfigError("all sizes must exceed the sparsity k")

    runtimes = {name: [] for name in algorithms}
    errors = {name: [] for name in algorithms}
    for si, size in enumerate(sizes):
        instances = [
            make_instance(
                InstanceSpec(
                    n=size,
                    m=size,
                    k=k,
                    sigma_min=1.0 / cond,
                    delta=0.0,
                    seed=instance_seed(base_seed, si, t),
                )
            )
            for t in range(trials)
        ]
        for name in algorithms:
            run = _STABILITY_RUNNERS[name]
            times, errs = [], []
            try:  # warm-up, untimed
                run(instances[0].dictionary, instances[0].y, k)
            except (RankDeficient, NumericalBreakdown):
                pass
            for instance in instances:
                start = time.perf_counter()
                try:
                    outcome = run(instance.dictionary, instance.y, k)
                except (RankDeficient, NumericalBreakdown):
                    times.append(time.perf_counter() - start)
                    errs.append(np.inf)
                    continue
                times.append(time.perf_counter() - start)
                diff = outcome.dense_coefficients(size) - instance.signal.dense()
                errs.append(float(np.linalg.norm(diff)))
            runtimes[name].append(float(np.median(times)))
            errors[name].append(float(np.median(errs)))
    return StabilityCurve(sizes=list(sizes), runtimes=runtimes, errors=errors)


# ---------------------------------------------------------------------------
# persistence

GRID_CSV_HEADER = [
    "algorithm",
    "axis1_name",
    "axis1",
    "axis2_name",
    "axis2",
    "trials",
    "successes",
    "frequency",
]

STABILITY_CSV_HEADER = ["algorithm", "m", "median_runtime_s", "median_error"]


def export_grid(grid: PhaseGrid, path, heatmap: bool = False) -> None:
    """Write a grid as CSV, one row per (algorithm, cell).

    With ``heatmap=True`` also renders one PNG per algorithm next to the
    CSV (requires matplotlib).
    """
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(GRID_CSV_HEADER)
            for name in grid.algorithms:
                for i, a1 in enumerate(grid.axis1):
                    for j, a2 in enumerate(grid.axis2):
                        writer.writerow(
                            [
                                name,
                                grid.axis1_name,
                                repr(a1),
                                grid.axis2_name,
                                repr(a2),
                                grid.trials,
                                int(grid.successes[name][i, j]),
                                repr(float(grid.frequencies[name][i, j])),
                            ]
                        )
    except OSError as err:
        raise OSError(f"cannot write grid CSV to {path}: {err}") from err
    if heatmap:
        _render_heatmaps(grid, path)


def _render_heatmaps(grid: PhaseGrid, csv_path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name in grid.algorithms:
        fig, ax = plt.subplots(figsize=(4.2, 3.6))
        mesh = ax.imshow(
            grid.frequencies[name].T,
            origin="lower",
            aspect="auto",
            vmin=0.0,
            vmax=1.0,
            extent=(
                -0.5,
                len(grid.axis1) - 0.5,
                -0.5,
                len(grid.axis2) - 0.5,
            ),
        )
        ax.set_xticks(range(len(grid.axis1)))
        ax.set_xticklabels([f"{v:g}" for v in grid.axis1], rotation=45)
        ax.set_yticks(range(len(grid.axis2)))
        ax.set_yticklabels([f"{v:g}" for v in grid.axis2])
        ax.set_xlabel(grid.axis1_name)
        ax.set_ylabel(grid.axis2_name)
        ax.set_title(f"{name}: recovery frequency")
        fig.colorbar(mesh, ax=ax)
        fig.tight_layout()
        out = csv_path.with_name(f"{csv_path.stem}_{name}.png")
        fig.savefig(out, dpi=120)
        plt.close(fig)


def import_grid(path) -> PhaseGrid:
    """Rebuild a PhaseGrid from its CSV export (seed is not persisted)."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != GRID_CSV_HEADER:
            raise ConfigError(f"{path}: unexpected CSV header {header}")
        rows = list(reader)
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    axis1_name = rows[0][1]
    axis2_name = rows[0][3]
    algorithms = list(dict.fromkeys(r[0] for r in rows))
    axis1 = list(dict.fromkeys(float(r[2]) for r in rows))
    axis2 = list(dict.fromkeys(float(r[4]) for r in rows))
    trials = int(rows[0][5])
    shape = (len(axis1), len(axis2))
    successes = {name: np.zeros(shape, dtype=int) for name in algorithms}
    frequencies = {name: np.zeros(shape) for name in algorithms}
    lookup1 = {v: i for i, v in enumerate(axis1)}
    lookup2 = {v: j for j, v in enumerate(axis2)}
    for r in rows:
        i, j = lookup1[float(r[2])], lookup2[float(r[4])]
        successes[r[0]][i, j] = int(r[6])
        frequencies[r[0]][i, j] = float(r[7])
    if axis1_name == "k":
        axis1 = [int(v) for v in axis1]
    return PhaseGrid(
        axis1_name=axis1_name,
        axis1=axis1,
        axis2_name=axis2_name,
        axis2=axis2,
        algorithms=algorithms,
        successes=successes,
        frequencies=frequencies,
        trials=trials,
        base_seed=0,
    )


def export_stability(curve: StabilityCurve, path) -> None:
    """Write a stability curve as CSV, one row per (algorithm, size)."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(STABILITY_CSV_HEADER)
            for name in curve.runtimes:
                for idx, size in enumerate(curve.sizes):
                    writer.writerow(
                        [
                            name,
                            size,
                            repr(curve.runtimes[name][idx]),
                            repr(curve.errors[name][idx]),
                        ]
                    )
    except OSError as err:
        raise OSError(f"cannot write stability CSV to {path}: {err}") from err
