"""Command-line entry point: simulate, fit, compare, plot, schedule, serve, export.

Machine-readable results go to files (JSON for structured output, CSV for
tabular and plot data, PNG figures next to the delimited output); the
resolved configuration of every run is echoed to stdout.  Exit codes:
0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import SCHEMA_VERSIONS, __version__
from . import distributions as dist
from . import figures, reporting, selection
from .dataset import load_csv_column
from .distributions import Family
from .errors import TempobenchError
from .fitting import fit_mle
from .scheduling import CostSpec, schedule_session, plan_to_dict
from . import simulate as sim
from .telemetry import ExclusionPolicy, SessionStore, export_durations_csv
from .telemetry.service import DEFAULT_MAX_BODY_BYTES, create_app

_VERSION_MESSAGE = "tempobench %(version)s (" + ", ".join(
    f"{k} v{v}" for k, v in SCHEMA_VERSIONS.items()
) + ")"


def _echo_config(**resolved: object) -> None:
    click.echo("config: " + json.dumps(resolved, sort_keys=True))


def _parse_model(text: str) -> dist.DurationModel:
    """Model argument: inline key-value record, inline JSON, or a JSON file."""
    text = text.strip()
    if text.startswith("{"):
        return dist.model_from_json(text)
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        content = path.read_text().strip()
        if content.startswith("{"):
            return dist.model_from_json(content)
        return dist.model_from_text(content)
    return dist.model_from_text(text)


def _load_dataset(input_path: str, column: str) -> Dataset:
    return load_csv_column(input_path, column)


@click.group()
@click.version_option(__version__, message=_VERSION_MESSAGE)
def cli() -> None:
    """Duration-model workbench for human-agent task timing."""


@cli.command()
@click.option("--input", "input_path", required=True, help="CSV file with a header row.")
@click.option("--column", required=True, help="Duration column to read.")
@click.option("--family", "family_name", default="all", show_default=True,
              type=click.Choice(["normal", "weibull", "gamma", "lognormal", "all"]))
@click.option("--out", "out_path", required=True, help="Output JSON path.")
def fit(input_path: str, column: str, family_name: str, out_path: str) -> None:
    """Maximum-likelihood fit of one or all families to a duration column."""
    _echo_config(command="fit", input=input_path, column=column,
                 family=family_name, out=out_path)
    data = _load_dataset(input_path, column)
    families = list(Family) if family_name == "all" else [Family(family_name)]
    fits = {}
    for fam in families:
        r = fit_mle(fam, data)
        fits[fam.value] = {
            "params": r.model.param_dict(),
            "log_likelihood": r.log_likelihood,
            "k": r.k,
            "converged": r.converged,
            "iterations": r.iterations,
        }
    out = {"input": input_path, "column": column, "n": data.n, "fits": fits}
    Path(out_path).write_text(json.dumps(out, indent=2) + "\n")
    click.echo(f"wrote {out_path}")


@cli.command()
@click.option("--input", "input_path", required=True)
@click.option("--column", required=True)
@click.option("--out", "out_base", required=True,
              help="Output base path; writes <out>.csv, <out>.json and <out>.png.")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Also render the diagnostic grid figure.")
def compare(input_path: str, column: str, out_base: str, figure: bool) -> None:
    """Fit all four families and rank them by AD, AIC and BIC."""
    _echo_config(command="compare", input=input_path, column=column,
                 out=out_base, figure=figure)
    data = _load_dataset(input_path, column)
    table = selection.compare_models(data)
    base = Path(out_base)
    if base.suffix in (".csv", ".json", ".png"):
        base = base.with_suffix("")
    selection.write_comparison_csv(table, base.with_suffix(".csv"))
    selection.write_comparison_json(table, base.with_suffix(".json"))
    written = [str(base.with_suffix(".csv")), str(base.with_suffix(".json"))]
    if figure:
        figures.render_comparison(table, data, base.with_suffix(".png"))
        written.append(str(base.with_suffix(".png")))
    click.echo("selected: " + json.dumps({c: f.value for c, f in table.selected.items()}))
    click.echo("wrote " + " ".join(written))


@cli.command()
@click.option("--kind", required=True, type=click.Choice(["qq", "cdf", "density"]))
@click.option("--model", "model_text", required=True,
              help="Model record: 'family=lognormal mu=.. sigma=..', JSON, or a JSON file.")
@click.option("--input", "input_path", required=True)
@click.option("--column", required=True)
@click.option("--out", "out_path", required=True, help="Output CSV path.")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Also render a PNG next to the CSV.")
def plot(kind: str, model_text: str, input_path: str, column: str,
         out_path: str, figure: bool) -> None:
    """Emit plot-series data (and a rendered figure) for one diagnostic."""
    _echo_config(command="plot", kind=kind, model=model_text, input=input_path,
                 column=column, out=out_path, figure=figure)
    model = _parse_model(model_text)
    data = _load_dataset(input_path, column)
    op = {
        "qq": reporting.qq_points,
        "cdf": reporting.cdf_overlay,
        "density": reporting.density_histogram,
    }[kind]
    series = op(model, data)
    reporting.write_series_csv(series, out_path)
    written = [out_path]
    if figure:
        png = str(Path(out_path).with_suffix(".png"))
        figures.render_series(series, png)
        written.append(png)
    click.echo("wrote " + " ".join(written))


@cli.command()
@click.option("--config", "config_path", required=True, help="Simulation config JSON.")
@click.option("--out", "out_dir", required=True, help="Output directory.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--sessions", type=int, default=None, help="Override n_sessions.")
def simulate(config_path: str, out_dir: str, seed: int | None,
             sessions: int | None) -> None:
    """Run the packaging-task simulation: traces plus a duration table."""
    cfg = sim.load_sim_config(config_path)
    if seed is not None:
        cfg = sim.SimConfig(cfg.orders, cfg.human, cfg.n_sessions, seed, cfg.run_id)
    if sessions is not None:
        cfg = sim.SimConfig(cfg.orders, cfg.human, sessions, cfg.seed, cfg.run_id)
    _echo_config(command="simulate", config=config_path, out=out_dir,
                 seed=cfg.seed, sessions=cfg.n_sessions, run_id=cfg.run_id)
    out = Path(out_dir)
    traces_dir = out / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    def sink(trace: sim.SessionTrace) -> None:
        (traces_dir / f"{trace.session_id}.jsonl").write_text(sim.trace_to_jsonl(trace))

    batch = sim.run_batch(cfg.orders, cfg.human, cfg.n_sessions, cfg.seed,
                          run_id=cfg.run_id, trace_sink=sink)
    (out / "durations.csv").write_text(sim.batch_to_csv(batch))
    click.echo(f"wrote {out / 'durations.csv'} and {cfg.n_sessions} traces")


@cli.command()
@click.option("--models", "model_texts", required=True, multiple=True,
              help="One model record per order (repeatable).")
@click.option("--cost-human", type=float, required=True)
@click.option("--cost-robot", type=float, required=True)
@click.option("--travel", "travels", type=float, multiple=True,
              help="Robot travel seconds per order (repeatable; default 0).")
@click.option("--out", "out_path", required=True, help="Output JSON path.")
def schedule(model_texts: tuple[str, ...], cost_human: float, cost_robot: float,
             travels: tuple[float, ...], out_path: str) -> None:
    """Quantile-optimal robot dispatch plan against per-order duration models."""
    _echo_config(command="schedule", models=list(model_texts), cost_human=cost_human,
                 cost_robot=cost_robot, travel=list(travels), out=out_path)
    models = [_parse_model(t) for t in model_texts]
    costs = CostSpec(c_human=cost_human, c_robot=cost_robot)
    travel = list(travels) if travels else 0.0
    plan = schedule_session(models, costs, travel)
    Path(out_path).write_text(json.dumps(plan_to_dict(plan), indent=2) + "\n")
    click.echo(f"wrote {out_path}")


@cli.command()
@click.option("--port", type=int, default=8420, show_default=True,
              envvar="TEMPOBENCH_PORT")
@click.option("--data-dir", required=True, envvar="TEMPOBENCH_DATA_DIR")
@click.option("--max-body-bytes", type=int, default=DEFAULT_MAX_BODY_BYTES,
              show_default=True, envvar="TEMPOBENCH_MAX_BODY_BYTES")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port: int, data_dir: str, max_body_bytes: int, host: str) -> None:
    """Run the telemetry ingestion service."""
    import uvicorn

    _echo_config(command="serve", host=host, port=port, data_dir=data_dir,
                 max_body_bytes=max_body_bytes)
    app = create_app(SessionStore(data_dir), max_body_bytes=max_body_bytes)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command()
@click.option("--data-dir", required=True, envvar="TEMPOBENCH_DATA_DIR")
@click.option("--policy", default="all", show_default=True,
              help="'all', 'none', or comma list of complete,unique-worker,survey.")
@click.option("--out", "out_path", required=True, help="Output CSV path.")
def export(data_dir: str, policy: str, out_path: str) -> None:
    """Write the retained-session duration CSV from a telemetry data dir."""
    parsed = ExclusionPolicy.parse(policy)
    _echo_config(command="export", data_dir=data_dir, policy=parsed.describe(),
                 out=out_path)
    store = SessionStore(data_dir)
    Path(out_path).write_text(export_durations_csv(store, parsed))
    click.echo(f"wrote {out_path} ({len(store)} stored sessions)")


def main() -> None:
    try:
        cli(standalone_mode=True)
    except (TempobenchError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
