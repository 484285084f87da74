"""Command-line entry points: simulation harness and the HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .bank import load_bank
from .config import load_config
from .reference import reference_bank
from .selection import SelectionStrategy, StrategyKind
from .session import TerminationConfig
from .simulator import ExamineeModel, run_exposure_experiment, sample_test_information


def _load(bank_path: str | None):
    return load_bank(bank_path) if bank_path else reference_bank()


def _parse_grid(spec: str) -> list[float]:
    try:
        start_s, stop_s, step_s = spec.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError:
        raise click.BadParameter(f"grid must look like -3:3:0.01, got {spec!r}")
    if step <= 0 or stop <= start:
        raise click.BadParameter(f"grid must ascend with a positive step, got {spec!r}")
    grid = []
    n = 0
    value = start
    while value <= stop + step * 1e-9:
        grid.append(round(value, 12))
        n += 1
        value = start + n * step
    return grid


@click.group()
def simulate() -> None:
    """Seeded simulations against an item bank."""


@simulate.command()
@click.option("--bank", "bank_path", type=click.Path(exists=True), default=None,
              help="Bank file; defaults to the shipped reference bank.")
@click.option("--n", "n_examinees", type=int, default=100, show_default=True)
@click.option("--strategy", type=click.Choice([k.value for k in StrategyKind]),
              default=StrategyKind.CLUSTERED_TOP_K_RANDOM.value, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-items", type=int, default=30, show_default=True)
@click.option("--p-correct", type=float, default=0.5, show_default=True,
              help="Simulated probability of a correct answer.")
@click.option("--true-theta", type=float, default=None,
              help="Answer from the response model at this ability instead of a coin.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the JSON report here instead of stdout.")
def exposure(bank_path, n_examinees, strategy, seed, max_items, p_correct, true_theta, out_path):
    """Run an item-exposure experiment and report per-item frequencies."""
    bank = _load(bank_path)
    model = (
        ExamineeModel.conforming(true_theta)
        if true_theta is not None
        else ExamineeModel.coin(p_correct)
    )
    report = run_exposure_experiment(
        bank,
        n_examinees,
        SelectionStrategy(kind=StrategyKind(strategy)),
        model,
        config=TerminationConfig(max_items=max_items),
        seed=seed,
    )
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path} (sigma={report.sigma:.4f})")
    else:
        sys.stdout.write(text)


@simulate.command()
@click.option("--bank", "bank_path", type=click.Path(exists=True), default=None,
              help="Bank file; defaults to the shipped reference bank.")
@click.option("--grid", default="-3:3:0.01", show_default=True,
              help="Ability grid as start:stop:step.")
@click.option("--active-only", is_flag=True, help="Ignore deactivated items.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write theta,information rows here instead of stdout.")
def tif(bank_path, grid, active_only, out_path):
    """Sample the test information curve over an ability grid."""
    bank = _load(bank_path)
    items = bank.active_items() if active_only else bank.items
    curve = sample_test_information([item.params for item in items], _parse_grid(grid))
    lines = ["theta,information"]
    lines += [f"{theta:g},{info:.10g}" for theta, info in curve]
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path} ({len(curve)} rows)")
    else:
        sys.stdout.write(text)


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file; environment variables override it.")
def serve(config_path):
    """Run the HTTP service."""
    import uvicorn

    from .api import create_app_from_config

    config = load_config(config_path)
    app = create_app_from_config(config)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    simulate()
