"""JSON-lines run log and console summary."""

import json
from pathlib import Path
from typing import Any

from coverage_scout.core.types import AggregateRow, GridPoint, RunResult
from coverage_scout.exceptions import PipelineError


class JSONReporter:
    """Per-map audit log (runs.jsonl) and human-readable summary."""

    @staticmethod
    def save_runs(runs: list[RunResult], output_path: str | Path) -> Path:
        """
        Save one JSON object per (map, method, k, n_sam) run.

        Keys are sorted and no timestamps are written, so identical runs give
        identical files.
        """
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, "w", encoding="utf-8") as f:
            for run in runs:
                f.write(json.dumps(JSONReporter._to_dict(run), sort_keys=True) + "\n")
        return output_file

    @staticmethod
    def load_runs(input_path: str | Path) -> list[RunResult]:
        """
        Load runs written by save_runs.

        Raises:
            PipelineError: If the file is missing or a line is not a valid run
        """
        path = Path(input_path)
        if not path.exists():
            raise PipelineError(f"Run log not found: {path}")

        runs = []
        with open(path, encoding="utf-8") as f:
            for line_num, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    runs.append(JSONReporter._from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                    raise PipelineError(f"{path}:{line_num}: invalid run record: {e}") from e
        if not runs:
            raise PipelineError(f"No runs found in {path}")
        return runs

    @staticmethod
    def _to_dict(run: RunResult) -> dict[str, Any]:
        return {
            "map_id": run.map_id,
            "method": run.method,
            "k": run.k,
            "n_sam": run.n_sam,
            "predictions": [[p.i, p.j] for p in run.predictions],
            "true_count": run.true_count,
            "unique_true_count": run.unique_true_count,
            "ch_count": run.ch_count,
            "precision": run.precision,
            "recall": run.recall,
        }

    @staticmethod
    def _from_dict(data: dict[str, Any]) -> RunResult:
        return RunResult(
            map_id=data["map_id"],
            method=data["method"],
            k=int(data["k"]),
            n_sam=int(data["n_sam"]),
            predictions=[GridPoint(int(i), int(j)) for i, j in data["predictions"]],
            true_count=int(data["true_count"]),
            unique_true_count=int(data["unique_true_count"]),
            ch_count=int(data["ch_count"]),
            precision=float(data["precision"]),
            recall=float(data["recall"]),
        )

    @staticmethod
    def print_summary(precision: list[AggregateRow], recall: list[AggregateRow]) -> None:
        """
        Print a precision/recall table to the console.

        Args:
            precision: Aggregated precision rows
            recall: Aggregated recall rows (matched by method, k, n_sam)
        """
        recall_by_key = {(r.method, r.k, r.n_sam): r for r in recall}
        n_maps = max((r.n_maps for r in precision), default=0)

        print("\n" + "=" * 72)
        print("COVERAGE SCOUT - DETECTION SUMMARY")
        print("=" * 72)
        print(f"\nMaps evaluated: {n_maps}")

        print("\n" + "-" * 72)
        print(f"{'method':12s} {'k':>3s} {'n_sam':>6s}   {'precision':>17s}   {'recall':>17s}")
        print("-" * 72)
        for row in sorted(precision, key=lambda r: (r.method, r.k, r.n_sam)):
            rec = recall_by_key.get((row.method, row.k, row.n_sam))
            rec_text = f"{rec.mean:.3f} +/- {rec.std:.3f}" if rec else "n/a"
            print(
                f"{row.method:12s} {row.k:3d} {row.n_sam:6d}   "
                f"{row.mean:.3f} +/- {row.std:.3f}   {rec_text:>17s}"
            )
        print("\n" + "=" * 72 + "\n")
