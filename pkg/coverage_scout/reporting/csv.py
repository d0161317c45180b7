"""CSV and gnuplot .dat reporting."""

import csv
import math
import re
from collections import defaultdict
from pathlib import Path

from coverage_scout.core.types import AggregateRow, EpisodeLog, Trajectory
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)

AGGREGATE_FIELDS = ("method", "k", "n_sam", "mean", "std", "n_maps")
TRAINING_FIELDS = ("episode", "steps", "return", "found_ch", "epsilon", "loss_mean")
TRAJECTORY_FIELDS = ("step", "i", "j", "rsrp")


def _fmt(value: float) -> str:
    return repr(float(value))


def dat_file_name(method: str) -> str:
    """File-system safe series name, e.g. ``bnp@16`` -> ``bnp_16.dat``."""
    return re.sub(r"[^A-Za-z0-9_.-]", "_", method) + ".dat"


class CSVReporter:
    """Write experiment tables, training logs and trajectory dumps."""

    @staticmethod
    def save_aggregates(rows: list[AggregateRow], output_path: str | Path) -> Path:
        """
        Save one metric table (precision.csv or recall.csv).

        Rows are sorted by method name, then k, then n_sam.
        """
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ordered = sorted(rows, key=lambda r: (r.method, r.k, r.n_sam))
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(AGGREGATE_FIELDS)
            for r in ordered:
                writer.writerow([r.method, r.k, r.n_sam, _fmt(r.mean), _fmt(r.std), r.n_maps])
        return path

    @staticmethod
    def load_aggregates(input_path: str | Path, metric: str) -> list[AggregateRow]:
        with open(input_path, encoding="utf-8", newline="") as f:
            return [
                AggregateRow(
                    metric=metric,
                    method=row["method"],
                    k=int(row["k"]),
                    n_sam=int(row["n_sam"]),
                    mean=float(row["mean"]),
                    std=float(row["std"]),
                    n_maps=int(row["n_maps"]),
                )
                for row in csv.DictReader(f)
            ]

    @staticmethod
    def save_dat_series(
        precision: list[AggregateRow], recall: list[AggregateRow], output_dir: str | Path
    ) -> list[Path]:
        """
        Write one gnuplot-ready file per method.

        Columns: n_sam, precision mean, precision std, recall mean, recall std.
        Each k is a separate data block (two blank lines apart, ``index`` in gnuplot).
        """
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)

        recall_by_key = {(r.method, r.k, r.n_sam): r for r in recall}
        by_method: dict[str, list[AggregateRow]] = defaultdict(list)
        for row in precision:
            by_method[row.method].append(row)

        written = []
        for method in sorted(by_method):
            path = out / dat_file_name(method)
            rows = sorted(by_method[method], key=lambda r: (r.k, r.n_sam))
            blocks: list[str] = []
            for k in sorted({r.k for r in rows}):
                lines = [f"# method={method} k={k}", "# n_sam p_mean p_std r_mean r_std"]
                for r in (r for r in rows if r.k == k):
                    rec = recall_by_key.get((method, k, r.n_sam))
                    r_mean = rec.mean if rec else math.nan
                    r_std = rec.std if rec else math.nan
                    lines.append(
                        f"{r.n_sam} {_fmt(r.mean)} {_fmt(r.std)} {_fmt(r_mean)} {_fmt(r_std)}"
                    )
                blocks.append("\n".join(lines))
            path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")
            written.append(path)
        return written

    @staticmethod
    def save_training_log(rows: list[EpisodeLog], output_path: str | Path) -> Path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRAINING_FIELDS)
            for r in rows:
                writer.writerow(
                    [
                        r.episode,
                        r.steps,
                        _fmt(r.return_),
                        int(r.found_ch),
                        _fmt(r.epsilon),
                        _fmt(r.loss_mean),
                    ]
                )
        return path

    @staticmethod
    def load_training_log(input_path: str | Path) -> list[EpisodeLog]:
        with open(input_path, encoding="utf-8", newline="") as f:
            return [
                EpisodeLog(
                    episode=int(row["episode"]),
                    steps=int(row["steps"]),
                    return_=float(row["return"]),
                    found_ch=row["found_ch"] == "1",
                    epsilon=float(row["epsilon"]),
                    loss_mean=float(row["loss_mean"]),
                )
                for row in csv.DictReader(f)
            ]

    @staticmethod
    def save_trajectory(trajectory: Trajectory, output_path: str | Path) -> Path:
        """One row per visited cell; step 0 is the start measurement."""
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRAJECTORY_FIELDS)
            for step, (p, z) in enumerate(zip(trajectory.waypoints, trajectory.measurements)):
                writer.writerow([step, p.i, p.j, _fmt(z)])
        return path
