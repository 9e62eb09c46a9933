"""Experiment orchestration: rejection-rate grids, the uniform-mixture radius
grid (bootstrap and true-Monte-Carlo variants), and the consistency
illustration.

Every (model, n, replicate) cell owns an independent sub-stream keyed by
(master_seed, model index, n index, replicate index, purpose), so results are
deterministic and independent of scheduling. Per-replicate detail rows are
always written; cell aggregation is a pure fold over them.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import ParameterError
from .kmeans import fit
from .metrics import orbit_distance
from .models import ModelSpec, population_catalog, sample, urc3k2_wcss
from .rng import RngStream, TAG_BOOT, TAG_FIT, TAG_SAMPLE
from .uniqueness import bootstrap_draws, decide, normal_quantile

DESK_REPLICATES = 20
DESK_B = 200
DESK_MAX_N = 100_000
PAPER_REPLICATES = 200
PAPER_B = 1000

CELLS_HEADER = ("model,family,r,dim,k,n,replicates,rejections,rejection_rate,"
                "mean_kmeans_time_s,mean_test_time_s")
DETAIL_HEADER = "model,n,replicate,t_bar_star,reject,base_wcss,kmeans_time_s,test_time_s,seed"


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[ModelSpec, ...]
    sample_sizes: tuple[int, ...]
    replicates: int = DESK_REPLICATES
    B: int = DESK_B
    alpha: float = 0.05
    restarts: int = 20
    master_seed: int = 0
    parallelism: int = 1
    record_times: bool = True

    def __post_init__(self):
        if self.replicates < 1:
            raise ParameterError("replicates must be >= 1")
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            models=tuple(ModelSpec.from_json(m) for m in obj["models"]),
            sample_sizes=tuple(obj["sample_sizes"]),
            replicates=int(obj.get("replicates", DESK_REPLICATES)),
            B=int(obj.get("B", DESK_B)),
            alpha=float(obj.get("alpha", 0.05)),
            restarts=int(obj.get("restarts", 20)),
            master_seed=int(obj["master_seed"]),
            parallelism=int(obj.get("parallelism", 1)),
            record_times=bool(obj.get("record_times", True)),
        )


@dataclass
class ReplicateRecord:
    model_idx: int
    n_idx: int
    replicate: int
    model_label: str
    n: int
    t_bar_star: float
    reject: bool
    base_wcss: float
    kmeans_time_s: float
    test_time_s: float
    seed: int
    failed: bool = False


@dataclass
class CellResult:
    model: ModelSpec
    n: int
    rejections: int
    replicates: int
    rejection_rate: float
    mean_kmeans_time_s: float
    mean_test_time_s: float
    failures: int = 0

    def csv_row(self) -> str:
        m = self.model
        return ",".join(_fmt(v) for v in (
            m.label, m.family, "" if m.r is None else _fmt(m.r), m.dim, m.k,
            self.n, self.replicates, self.rejections, self.rejection_rate,
            self.mean_kmeans_time_s, self.mean_test_time_s))


def _replicate_stream(master_seed: int, model_idx: int, n_idx: int, rep: int) -> RngStream:
    return RngStream(master_seed).child(model_idx, n_idx, rep)


def _run_replicate(args) -> ReplicateRecord:
    cfg, model_idx, n_idx, rep = args
    spec = cfg.models[model_idx]
    n = cfg.sample_sizes[n_idx]
    stream = _replicate_stream(cfg.master_seed, model_idx, n_idx, rep)
    try:
        data = sample(spec, n, stream.child(TAG_SAMPLE))
        t0 = time.perf_counter()
        draws = bootstrap_draws(data, spec.k, cfg.B, cfg.restarts, stream.child(TAG_BOOT))
        report = decide(draws, cfg.alpha)
        test_time = time.perf_counter() - t0
        km_time = draws.base_fit_time
        if not cfg.record_times:
            test_time = km_time = 0.0
        return ReplicateRecord(
            model_idx=model_idx, n_idx=n_idx, replicate=rep, model_label=spec.label,
            n=n, t_bar_star=report.t_bar_star, reject=report.reject,
            base_wcss=report.base_wcss, kmeans_time_s=km_time,
            test_time_s=test_time, seed=stream.derived_seed())
    except Exception:  # replicate failures are recorded, not fatal
        return ReplicateRecord(
            model_idx=model_idx, n_idx=n_idx, replicate=rep, model_label=spec.label,
            n=n, t_bar_star=float("nan"), reject=False, base_wcss=float("nan"),
            kmeans_time_s=0.0, test_time_s=0.0, seed=stream.derived_seed(),
            failed=True)


def run_grid(cfg: ExperimentConfig, cells_path=None, detail_path=None) -> list[CellResult]:
    tasks = [(cfg, mi, ni, rep)
             for mi in range(len(cfg.models))
             for ni in range(len(cfg.sample_sizes))
             for rep in range(cfg.replicates)]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            records = list(pool.map(_run_replicate, tasks, chunksize=1))
    else:
        records = [_run_replicate(t) for t in tasks]
    records.sort(key=lambda r: (r.model_idx, r.n_idx, r.replicate))

    if detail_path is not None:
        with open(detail_path, "w") as fh:
            fh.write(DETAIL_HEADER + "\n")
            for r in records:
                fh.write(",".join(_fmt(v) for v in (
                    r.model_label, r.n, r.replicate, r.t_bar_star,
                    int(r.reject), r.base_wcss, r.kmeans_time_s,
                    r.test_time_s, r.seed)) + "\n")

    cells = []
    for mi in range(len(cfg.models)):
        for ni in range(len(cfg.sample_sizes)):
            group = [r for r in records if r.model_idx == mi and r.n_idx == ni]
            ok = [r for r in group if not r.failed]
            rej = sum(r.reject for r in ok)
            cells.append(CellResult(
                model=cfg.models[mi], n=cfg.sample_sizes[ni],
                rejections=rej, replicates=len(group),
                rejection_rate=rej / len(group),
                mean_kmeans_time_s=(sum(r.kmeans_time_s for r in ok) / len(ok)) if ok else 0.0,
                mean_test_time_s=(sum(r.test_time_s for r in ok) / len(ok)) if ok else 0.0,
                failures=len(group) - len(ok)))
    if cells_path is not None:
        with open(cells_path, "w") as fh:
            fh.write(CELLS_HEADER + "\n")
            for c in cells:
                fh.write(c.csv_row() + "\n")
    return cells


def run_r_grid(radii, n: int, replicates: int, B: int, alpha: float,
               master_seed: int, restarts: int = 20,
               cells_path=None, detail_path=None) -> list[CellResult]:
    """Bootstrap uniqueness test over the uniform-mixture radius grid."""
    for r in radii:
        if not 0.0 <= r <= 0.5:
            raise ParameterError(f"radius {r} outside [0, 1/2]")
    cfg = ExperimentConfig(
        models=tuple(ModelSpec("UrC3k2", r=float(r)) for r in radii),
        sample_sizes=(n,), replicates=replicates, B=B, alpha=alpha,
        restarts=restarts, master_seed=master_seed)
    return run_grid(cfg, cells_path=cells_path, detail_path=detail_path)


def run_mc_grid(radii, n: int, replicates: int, master_seed: int,
                alpha: float = 0.05, restarts: int = 20,
                cells_path=None) -> list[CellResult]:
    """True Monte-Carlo variant: replicates are fresh samples, each yielding
    sqrt(n) * (Wn - W(P_r)) with the closed-form population WCSS; one
    standardized-mean decision per radius."""
    if replicates < 2:
        raise ParameterError("replicates must be >= 2 for the mean statistic")
    cells = []
    threshold = normal_quantile(alpha)
    for ri, r in enumerate(radii):
        if not 0.0 <= r <= 0.5:
            raise ParameterError(f"radius {r} outside [0, 1/2]")
        spec = ModelSpec("UrC3k2", r=float(r))
        w_pop = urc3k2_wcss(float(r))
        t_vals = []
        km_time = 0.0
        for rep in range(replicates):
            stream = _replicate_stream(master_seed, ri, 0, rep)
            data = sample(spec, n, stream.child(TAG_SAMPLE))
            f = fit(data, spec.k, restarts, stream.child(TAG_FIT))
            km_time += f.wall_time
            t_vals.append(math.sqrt(n) * (f.wcss - w_pop))
        s = _std(t_vals)
        if s > 0:
            t_bar = math.fsum(t_vals) / (s * math.sqrt(replicates))
            reject = t_bar < threshold
        else:
            reject = False
        cells.append(CellResult(
            model=spec, n=n, rejections=replicates if reject else 0,
            replicates=replicates, rejection_rate=1.0 if reject else 0.0,
            mean_kmeans_time_s=km_time / replicates, mean_test_time_s=0.0))
    if cells_path is not None:
        with open(cells_path, "w") as fh:
            fh.write(CELLS_HEADER + "\n")
            for c in cells:
                fh.write(c.csv_row() + "\n")
    return cells


def _std(values) -> float:
    m = math.fsum(values) / len(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / (len(values) - 1))


def run_consistency(spec: ModelSpec, samples: int, n: int, restarts: int,
                    master_seed: int, orbit_grid: int = 3600,
                    centers_path=None):
    """Fit k-means on `samples` fresh datasets and record each canonical
    center set with its distance to (and index of) the nearest catalog entry."""
    catalog = population_catalog(spec)
    out = []
    for s in range(samples):
        stream = _replicate_stream(master_seed, 0, 0, s)
        data = sample(spec, n, stream.child(TAG_SAMPLE))
        f = fit(data, spec.k, restarts, stream.child(TAG_FIT))
        dist, entry_idx = orbit_distance(f.centers, catalog, orbit_grid=orbit_grid)
        out.append((f.centers, dist, entry_idx))
    if centers_path is not None:
        with open(centers_path, "w") as fh:
            cols = ",".join(f"x{i + 1}" for i in range(spec.dim))
            fh.write(f"model,sample_idx,center_idx,{cols},orbit_distance\n")
            for s, (cs, dist, _) in enumerate(out):
                for ci in range(cs.k):
                    coords = ",".join(_fmt(v) for v in cs.centers[ci])
                    fh.write(f"{spec.label},{s},{ci},{coords},{_fmt(dist)}\n")
    return out
