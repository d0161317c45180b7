"""CLI entry point for coverage-scout."""

import os
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, NoReturn, TypeVar

import click
from dotenv import load_dotenv

from coverage_scout import __version__
from coverage_scout.core.config import Config
from coverage_scout.exceptions import CoverageScoutError
from coverage_scout.utils.logging import (
    LOG_LEVEL_ENV,
    disable_logging,
    enable_file_logging,
    get_logger,
    set_log_level,
)

logger = get_logger(__name__)

DEFAULT_CONFIG = ".coverage-scout.yml"

T = TypeVar("T")


def _fail(error: Exception) -> NoReturn:
    click.echo(f"❌ Error: {error}", err=True)
    sys.exit(1)


def _list_option(cast: Callable[[str], T]) -> Callable[[click.Context, click.Parameter, Any], Any]:
    """Click callback parsing ``a,b,c`` into a typed list (None stays None)."""

    def parse(ctx: click.Context, param: click.Parameter, value: str | None) -> list[T] | None:
        if value is None:
            return None
        try:
            items = [cast(v.strip()) for v in value.split(",") if v.strip()]
        except ValueError as e:
            raise click.BadParameter(f"cannot parse {value!r}: {e}") from e
        if not items:
            raise click.BadParameter("expected a comma-separated list")
        return items

    return parse


def _config(ctx: click.Context, overrides: dict[str, Any]) -> Config:
    base: Config = ctx.obj["config"]
    return base.merge(overrides)


@click.group()
@click.version_option(__version__)
@click.option(
    "--config",
    "config_path",
    default=None,
    help=f"YAML config file (default: {DEFAULT_CONFIG} if present)",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help=f"Log level (default: ${LOG_LEVEL_ENV} or INFO)",
)
@click.option("--log-file", default=None, help="Also write log records to this file")
@click.option("--quiet", is_flag=True, help="Suppress log output")
@click.pass_context
def main(
    ctx: click.Context,
    config_path: str | None,
    log_level: str | None,
    log_file: str | None,
    quiet: bool,
) -> None:
    """coverage-scout - coverage-hole detection with UAV waypoint predictors."""
    load_dotenv()
    level = log_level or os.environ.get(LOG_LEVEL_ENV)
    if quiet:
        disable_logging()
    elif level:
        set_log_level(level)
    if log_file is not None:
        enable_file_logging(log_file)

    try:
        if config_path is not None:
            config = Config.from_yaml(config_path)
        elif Path(DEFAULT_CONFIG).exists():
            config = Config.from_yaml(DEFAULT_CONFIG)
        else:
            config = Config()
    except CoverageScoutError as e:
        _fail(e)

    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@main.command("gen-maps")
@click.option("--n", "n_maps", type=int, default=10, show_default=True, help="Number of maps")
@click.option("--l", "side", type=int, default=None, help="Grid side L in cells")
@click.option("--fill", type=float, default=None, help="Target occupied fraction")
@click.option("--street-width", type=int, default=None, help="Clearance between buildings")
@click.option("--seed", type=int, default=None, help="Corpus base seed")
@click.option("--out", "out_dir", required=True, help="Output directory")
@click.option("--jobs", type=int, default=None, help="Worker processes")
@click.pass_context
def gen_maps(
    ctx: click.Context,
    n_maps: int,
    side: int | None,
    fill: float | None,
    street_width: int | None,
    seed: int | None,
    out_dir: str,
    jobs: int | None,
) -> None:
    """Generate a corpus of synthetic building maps."""
    from coverage_scout.world.mapgen import generate_corpus

    try:
        config = _config(
            ctx,
            {
                "mapgen.side": side,
                "mapgen.target_fill": fill,
                "mapgen.street_width": street_width,
                "jobs": jobs,
            },
        )
        params = config.mapgen.model_copy(update={"seed": config.resolve_seed(seed)})
        manifest = generate_corpus(params, n_maps, out_dir, jobs=config.jobs)
    except CoverageScoutError as e:
        _fail(e)

    click.echo(f"✅ Wrote {len(manifest)} maps and manifest to {manifest.root}")


@main.command("gen-coverage")
@click.option("--corpus", required=True, help="Corpus directory or manifest.csv")
@click.option("--seed", type=int, default=None, help="Base-station placement seed")
@click.option("--p0", type=float, default=None, help="Reference power P0 in dB")
@click.option("--exp", "exponent", type=float, default=None, help="Path-loss exponent")
@click.option("--wall-loss", type=float, default=None, help="Loss per wall in dB")
@click.option("--bs-per-map", type=int, default=None, help="Base stations per map")
@click.option("--shadow-seed", type=int, default=None, help="Enable log-normal shadowing")
@click.option("--eps", type=float, default=None, help="Coverage-hole threshold in dB")
@click.option("--jobs", type=int, default=None, help="Worker processes")
@click.pass_context
def gen_coverage(
    ctx: click.Context,
    corpus: str,
    seed: int | None,
    p0: float | None,
    exponent: float | None,
    wall_loss: float | None,
    bs_per_map: int | None,
    shadow_seed: int | None,
    eps: float | None,
    jobs: int | None,
) -> None:
    """Place base stations and compute RSRP maps for a corpus."""
    from coverage_scout.core.loader import CorpusManifest
    from coverage_scout.world.propagation import generate_coverage_corpus

    try:
        config = _config(
            ctx,
            {
                "propagation.p0_db": p0,
                "propagation.pathloss_exponent": exponent,
                "propagation.wall_loss_db": wall_loss,
                "propagation.bs_per_map": bs_per_map,
                "propagation.shadow_seed": shadow_seed,
                "experiment.eps_ch_db": eps,
                "jobs": jobs,
            },
        )
        manifest = generate_coverage_corpus(
            CorpusManifest.load(corpus),
            config.propagation,
            seed=config.resolve_seed(seed),
            ch_threshold_db=config.experiment.eps_ch_db,
            jobs=config.jobs,
        )
    except CoverageScoutError as e:
        _fail(e)

    click.echo(f"✅ Wrote {len(manifest)} coverage maps to {manifest.root}")


@main.command()
@click.option("--corpus", required=True, help="Corpus directory or coverage.csv")
@click.option("--episodes", type=int, default=None, help="Training episodes")
@click.option("--step-limit", type=int, default=None, help="Movement window half-width l")
@click.option("--seed", type=int, default=None, help="Training seed")
@click.option("--out", "out_dir", required=True, help="Output directory for the checkpoint")
@click.option("--resume", default=None, help="Checkpoint to continue training from")
@click.pass_context
def train(
    ctx: click.Context,
    corpus: str,
    episodes: int | None,
    step_limit: int | None,
    seed: int | None,
    out_dir: str,
    resume: str | None,
) -> None:
    """Train the DDQN waypoint predictor."""
    from coverage_scout.agent.trainer import train as run_training
    from coverage_scout.core.loader import CoverageManifest
    from coverage_scout.core.pipeline import filter_coverage

    try:
        config = _config(
            ctx,
            {"agent.episodes": episodes, "agent.step_limit": step_limit},
        )
        resolved_seed = config.resolve_seed(seed)
        config = config.merge({"seed": resolved_seed})
        manifest = filter_coverage(CoverageManifest.load(corpus), config.corpus_filter)
        result = run_training(
            manifest, config.agent, seed=resolved_seed, output_dir=out_dir, resume=resume
        )
        config.to_yaml(Path(out_dir) / "config.yml")
    except CoverageScoutError as e:
        _fail(e)

    click.echo(
        f"✅ Trained {len(result.log)} episodes "
        f"(detection rate {result.detection_rate:.2f}); checkpoint: {result.checkpoint_path}"
    )


@main.command("eval")
@click.option("--corpus", required=True, help="Corpus directory or coverage.csv")
@click.option("--methods", callback=_list_option(str), default=None, help="e.g. rsp,bnp@16,ddqn")
@click.option("--k", "k_values", callback=_list_option(int), default=None, help="e.g. 1,2,4")
@click.option("--n-sam", callback=_list_option(int), default=None, help="e.g. 25,50,100")
@click.option("--d-b", type=float, default=None, help="Default d_B in meters for bnp/gbnp")
@click.option("--eps", type=float, default=None, help="Coverage-hole threshold in dB")
@click.option("--ckpt", default=None, help="Policy checkpoint for ddqn")
@click.option("--dump-trajectories", is_flag=True, help="Write per-rollout CSVs")
@click.option("--independent-starts", is_flag=True, help="Per-method start draws")
@click.option("--seed", type=int, default=None, help="Start-point seed")
@click.option("--out", "out_dir", default=None, help="Report directory")
@click.option("--jobs", type=int, default=None, help="Worker processes")
@click.pass_context
def eval_cmd(
    ctx: click.Context,
    corpus: str,
    methods: list[str] | None,
    k_values: list[int] | None,
    n_sam: list[int] | None,
    d_b: float | None,
    eps: float | None,
    ckpt: str | None,
    dump_trajectories: bool,
    independent_starts: bool,
    seed: int | None,
    out_dir: str | None,
    jobs: int | None,
) -> None:
    """Evaluate predictors and write precision/recall reports."""
    from coverage_scout.core.loader import CoverageManifest
    from coverage_scout.core.pipeline import emit_report, evaluate
    from coverage_scout.reporting.json import JSONReporter

    try:
        config = _config(
            ctx,
            {
                "experiment.methods": methods,
                "experiment.k_values": k_values,
                "experiment.n_sam": n_sam,
                "experiment.d_b_m": d_b,
                "experiment.eps_ch_db": eps,
                "experiment.checkpoint": ckpt,
                "experiment.dump_trajectories": True if dump_trajectories else None,
                "experiment.shared_starts": False if independent_starts else None,
                "reporting.output_dir": out_dir,
                "jobs": jobs,
            },
        )
        out = Path(config.reporting.output_dir)
        result = evaluate(
            config,
            CoverageManifest.load(corpus),
            seed=config.resolve_seed(seed),
            jobs=config.jobs,
            output_dir=out,
        )
        written = emit_report(result, out)
    except CoverageScoutError as e:
        _fail(e)

    JSONReporter.print_summary(result.precision, result.recall)
    if result.skipped_maps:
        click.echo(f"ℹ️  Skipped {len(result.skipped_maps)} maps without coverage holes")
    click.echo(f"💾 Wrote {len(written)} report files to {out}")


@main.command()
@click.option("--runs", "runs_path", required=True, help="runs.jsonl written by eval")
@click.option("--out", "out_dir", default=None, help="Report directory (default: next to runs)")
def report(runs_path: str, out_dir: str | None) -> None:
    """Regenerate precision/recall tables and .dat series from a run log."""
    from coverage_scout.core.pipeline import report_from_runs
    from coverage_scout.reporting.json import JSONReporter

    out = Path(out_dir) if out_dir is not None else Path(runs_path).parent
    try:
        result = report_from_runs(runs_path, out)
    except CoverageScoutError as e:
        _fail(e)

    JSONReporter.print_summary(result.precision, result.recall)
    click.echo(f"💾 Report regenerated in {out}")


if __name__ == "__main__":
    main()
