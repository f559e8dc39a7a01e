"""One experiment = generate data, train, probe; records round-trip via CSV.

Every results row embeds the complete run configuration, so any row can be
re-run bit-identically (same backend and machine) from the CSV alone.
"""

import csv
import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ._kernels import backend_name
from .errors import DivergenceError, HsicSslError
from .runconfig import RunConfig, SweepPlan, config_from_items, config_to_items
from .synthgen import generate_from_config
from .trainer import TrainedModel, extract_features, linear_probe, train

_OUTPUT_COLS = ("backend", "status", "error", "accuracy", "final_loss",
                "loss_trajectory", "wall_seconds")


def run_id_for(cfg: RunConfig) -> str:
    """Deterministic id: hash of the canonical config items."""
    blob = ";".join(f"{k}={v}" for k, v in sorted(config_to_items(cfg).items()))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class ExperimentRecord:
    config: RunConfig
    run_id: str
    backend: str
    status: str                 # ok | diverged
    error: str
    accuracy: float             # NaN unless status == ok
    final_loss: float
    loss_trajectory: tuple
    wall_seconds: float

    def to_row(self) -> dict[str, str]:
        row = {"run_id": self.run_id}
        row.update(config_to_items(self.config))
        row.update({
            "backend": self.backend,
            "status": self.status,
            "error": self.error,
            "accuracy": repr(self.accuracy),
            "final_loss": repr(self.final_loss),
            "loss_trajectory": ";".join(repr(v) for v in self.loss_trajectory),
            "wall_seconds": f"{self.wall_seconds:.3f}",
        })
        return row


def record_from_row(row: dict[str, str]) -> ExperimentRecord:
    items = {k: v for k, v in row.items()
             if k not in _OUTPUT_COLS and k != "run_id"}
    cfg = config_from_items(items, "<results row>")
    traj = tuple(float(v) for v in row["loss_trajectory"].split(";") if v)
    return ExperimentRecord(
        cfg, row["run_id"], row["backend"], row["status"], row["error"],
        float(row["accuracy"]), float(row["final_loss"]), traj,
        float(row["wall_seconds"]))


def run_experiment(cfg: RunConfig) -> tuple[ExperimentRecord, TrainedModel | None]:
    """Full pipeline for one config. Divergence yields a flagged partial
    record instead of propagating, so sweeps can skip and continue."""
    start = time.perf_counter()
    rid = run_id_for(cfg)
    dataset = generate_from_config(cfg.gen_config(), cfg.data_seed_)
    try:
        model = train(dataset, cfg.encoder_config(), cfg.train_config())
    except DivergenceError as exc:
        wall = time.perf_counter() - start
        rec = ExperimentRecord(cfg, rid, backend_name(), "diverged", str(exc),
                               math.nan, math.nan, (), wall)
        return rec, None
    feats = extract_features(model, dataset.view_a)
    probe = linear_probe(feats, dataset.labels, cfg.train_fraction,
                         cfg.probe_epochs, cfg.probe_seed_)
    wall = time.perf_counter() - start
    rec = ExperimentRecord(cfg, rid, backend_name(), "ok", "",
                           probe.accuracy, model.loss_history[-1],
                           tuple(model.loss_history), wall)
    return rec, model


def _sweep_worker(cfg: RunConfig) -> ExperimentRecord:
    try:
        record, _ = run_experiment(cfg)
    except HsicSslError as exc:
        record = ExperimentRecord(cfg, run_id_for(cfg), backend_name(),
                                  "failed", str(exc), math.nan, math.nan,
                                  (), 0.0)
    return record


def run_sweep(plan: SweepPlan, jobs: int = 1) -> list[ExperimentRecord]:
    """Run the plan's cross product; records come back in plan order.

    Individual failures are recorded with a non-ok status and skipped.
    """
    configs = plan.run_configs()
    if jobs <= 1:
        return [_sweep_worker(cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_worker, configs))


# ---------------------------------------------------------------------------
# Results CSV
# ---------------------------------------------------------------------------

def _columns(record: ExperimentRecord) -> list[str]:
    return list(record.to_row().keys())


def append_records(path, records: list[ExperimentRecord]) -> None:
    if not records:
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    new_file = not path.exists()
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_columns(records[0]))
        if new_file:
            writer.writeheader()
        for rec in records:
            writer.writerow(rec.to_row())


def read_records(path) -> list[ExperimentRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [record_from_row(row) for row in csv.DictReader(fh)]
