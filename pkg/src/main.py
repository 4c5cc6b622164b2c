"""
Main entry point for the grid-forming inverter simulator and gain tuner.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import click
import structlog
from rich.console import Console

from config.settings import Settings, load_scenario
from errors import ConfigurationError, GfmTunerError
from models.control import SmcGains
from models.scenario import Scenario
from optimizer.campaign import OPTIMIZERS, campaign_seeds, run_campaign
from reporting.tables import campaign_table, render_comparison
from reporting.writers import (build_comparison_rows, write_comparison_csv, write_median_curves_csv,
                               write_report_csv, write_report_text, write_summary, write_trace_csv)
from simulator.engine import RunOptions, ScenarioCost, default_scenario, run_scenario
from simulator.metrics import run_summary

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2


def configure_logging(verbose: bool = False, log_dir: str = "logs") -> None:
    """Route structlog through stdlib logging to the console and a log file."""
    os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(), logging.FileHandler(os.path.join(log_dir, "gfm_tuner.log"))],
        force=True,
    )
    logging.getLogger("numba").setLevel(logging.WARNING)
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.processors.KeyValueRenderer(key_order=["event"], sort_keys=True),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


@dataclass
class RunConfig:
    """Resolved command-line request."""
    mode: str
    optimizer: str
    seeds: List[int]
    out_dir: Path
    scenario: Scenario
    threshold: float
    workers: int
    trace: bool = False
    gains: Optional[SmcGains] = None

    @property
    def seed(self) -> int:
        return self.seeds[0]


def parse_gains(text: str) -> SmcGains:
    """``kcd,kcq,ksat`` -> SmcGains."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigurationError(f"--gains expects kcd,kcq,ksat, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise ConfigurationError(f"--gains expects three numbers, got {text!r}") from e
    return SmcGains.from_vector(values)


def parse_seeds(text: Optional[str], seed: int, repetitions: int) -> List[int]:
    if text is None:
        return campaign_seeds(seed, repetitions)
    try:
        seeds = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise ConfigurationError(f"--seeds expects comma-separated integers, got {text!r}") from e
    if not seeds:
        raise ConfigurationError("--seeds is empty")
    return seeds


def prepare_output(out: str) -> Path:
    out_dir = Path(out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"cannot create output directory {out_dir}: {e}") from e
    if not os.access(out_dir, os.W_OK):
        raise ConfigurationError(f"output directory {out_dir} is not writable")
    return out_dir


def cmd_simulate(cfg: RunConfig, settings: Settings) -> int:
    """Run one scenario with trace capture and write the trace and a metrics summary."""
    gains = cfg.gains or settings.baseline_gains()
    result = run_scenario(gains, cfg.scenario, RunOptions.from_settings(settings, record_trace=True))

    stem = f"simulate_{cfg.optimizer}_{cfg.seed}"
    write_trace_csv(result.trace, cfg.out_dir / f"{stem}.csv")
    write_summary(run_summary(result, cfg.scenario, gains), cfg.out_dir / f"{stem}.txt")
    logger.info("simulation_finished", iae=result.iae, diverged=result.diverged)

    if result.diverged:
        click.echo(f"error: simulation diverged at t={result.diverged_at:.6g} s; partial trace written", err=True)
        return EXIT_DIVERGED
    click.echo(f"iae: {result.iae:.9g}")
    return EXIT_OK


def _run_method(method: str, prefix: str, cfg: RunConfig, settings: Settings):
    cost = ScenarioCost(cfg.scenario, RunOptions.from_settings(settings))

    def save(report):
        write_report_text(report, cfg.out_dir / f"{prefix}_{method}_{report.seed}.txt")
        write_report_csv(report, cfg.out_dir / f"{prefix}_{method}_{report.seed}.csv")

    return run_campaign(method, cost, settings.search_space_model(), cfg.seeds, settings,
                        workers=cfg.workers, penalty=settings.run.penalty, on_report=save)


def _write_best_trace(campaign, prefix: str, cfg: RunConfig, settings: Settings) -> None:
    best = campaign.best_report
    result = run_scenario(best.best_gains, cfg.scenario, RunOptions.from_settings(settings, record_trace=True))
    write_trace_csv(result.trace, cfg.out_dir / f"{prefix}_{campaign.method}_{best.seed}_trace.csv")


def cmd_optimize(cfg: RunConfig, settings: Settings) -> int:
    """Run a campaign and write per-run reports, the aggregate summary and the best-gain trace."""
    campaign = _run_method(cfg.optimizer, "optimize", cfg, settings)
    best = campaign.best_report

    summary = dict(campaign.summary())
    summary["threshold"] = cfg.threshold
    summary["convergence_iteration"] = campaign.median_convergence(cfg.threshold)
    summary["best_seed"] = best.seed
    summary.update(zip(best.names, best.best_x))
    summary["seeds"] = ",".join(str(s) for s in cfg.seeds)
    write_summary(summary, cfg.out_dir / f"optimize_{cfg.optimizer}_summary.txt")

    _write_best_trace(campaign, "optimize", cfg, settings)
    click.echo(f"mean_iae: {campaign.mean_cost:.9g}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, settings: Settings) -> int:
    """Untuned baseline plus one campaign per optimizer on the same scenario and seeds."""
    baseline_gains = settings.baseline_gains()
    baseline = run_scenario(baseline_gains, cfg.scenario,
                            RunOptions.from_settings(settings, record_trace=cfg.trace))
    if cfg.trace and baseline.trace is not None:
        write_trace_csv(baseline.trace, cfg.out_dir / f"compare_baseline_{cfg.seed}_trace.csv")

    campaigns = {}
    for method in OPTIMIZERS:
        campaigns[method] = _run_method(method, "compare", cfg, settings)
        if cfg.trace:
            _write_best_trace(campaigns[method], "compare", cfg, settings)

    rows = build_comparison_rows(baseline.iae, campaigns, cfg.threshold)
    write_comparison_csv(rows, cfg.out_dir / "compare_table.csv")
    write_median_curves_csv(campaigns, cfg.out_dir / "compare_median_curves.csv")
    render_comparison(rows)
    click.echo("")
    Console().print(campaign_table(campaigns.values()))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "compare": cmd_compare,
}


@click.command()
@click.option("--mode", type=click.Choice(sorted(COMMANDS)), default="simulate", show_default=True)
@click.option("--optimizer", type=click.Choice(sorted(OPTIMIZERS)), default="pso", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="First seed of the campaign.")
@click.option("--seeds", type=str, default=None, help="Comma-separated seeds; overrides --seed/--repetitions.")
@click.option("--repetitions", type=int, default=1, show_default=True)
@click.option("--scenario", "scenario_path", type=str, default=None,
              help="Scenario JSON file; the built-in three-event scenario when omitted.")
@click.option("--horizon", type=float, default=None, help="Cut the scenario to a shorter horizon (s).")
@click.option("--out", type=str, default="output", show_default=True, help="Output directory.")
@click.option("--trace", is_flag=True, help="Also write traces of the best gains in compare mode.")
@click.option("--threshold", type=float, default=None, help="Convergence threshold on the IAE.")
@click.option("--gains", type=str, default=None, help="kcd,kcq,ksat for simulate mode.")
@click.option("--config", "config_path", type=str, default=None, help="Settings JSON file.")
@click.option("--workers", type=int, default=None, help="Processes for intra-iteration cost evaluation.")
@click.option("--verbose", is_flag=True, help="Enable detailed debug logging")
@click.pass_context
def cli(ctx, mode, optimizer, seed, seeds, repetitions, scenario_path, horizon, out, trace,
        threshold, gains, config_path, workers, verbose):
    """Grid-forming inverter DAM-SMC simulator and metaheuristic gain tuner."""
    configure_logging(verbose)
    try:
        settings = Settings.load(config_path)
        scenario = load_scenario(scenario_path) if scenario_path else default_scenario(settings.linear_params())
        if horizon is not None:
            if not 0 <= horizon <= scenario.horizon:
                raise ConfigurationError(f"--horizon must lie in [0, {scenario.horizon}], got {horizon}")
            scenario = scenario.truncated(horizon)
        if workers is not None and workers < 1:
            raise ConfigurationError(f"--workers must be at least 1, got {workers}")

        cfg = RunConfig(
            mode=mode,
            optimizer=optimizer,
            seeds=parse_seeds(seeds, seed, repetitions),
            out_dir=prepare_output(out),
            scenario=scenario,
            threshold=threshold if threshold is not None else settings.run.threshold,
            workers=workers if workers is not None else settings.run.workers,
            trace=trace,
            gains=parse_gains(gains) if gains else None,
        )
        if not cfg.threshold > 0:
            raise ConfigurationError(f"--threshold must be positive, got {cfg.threshold}")
        logger.info("run_started", mode=mode, optimizer=optimizer, seeds=cfg.seeds, scenario=scenario.name)
        status = COMMANDS[mode](cfg, settings)
    except GfmTunerError as e:
        logger.error("run_failed", error=str(e))
        click.echo(f"error: {e}", err=True)
        status = EXIT_CONFIG
    ctx.exit(status)


if __name__ == "__main__":
    cli()
