"""Command-line entry points.

Exit codes: 0 on success, 1 on configuration or schema errors, 2 on
runtime aborts (I/O failures, unexpected sweep-level exceptions).
"""

import sys
from dataclasses import replace

import click

from .bench import benchmark_backends, format_benchmark
from .errors import FdschedError, ParseError, SchemaError, ValidationError
from .harness import (config_reference, format_summary, load_config,
                      run_sweep, summarize)

_CONFIG_ERRORS = (ParseError, ValidationError, SchemaError)


def _fail(e: Exception):
    click.echo(f"error: {e}", err=True)
    sys.exit(1 if isinstance(e, _CONFIG_ERRORS) else 2)


def _load(config_path, realizations, seed):
    sweep, _ = load_config(config_path)
    if realizations is not None:
        if realizations < 1:
            raise ValidationError("realizations must be >= 1")
        sweep = replace(sweep, realizations=realizations)
    if seed is not None:
        if seed < 0:
            raise ValidationError("master_seed must be >= 0")
        sweep = replace(sweep, master_seed=seed)
    return sweep


@click.group()
def main():
    """Full-duplex antenna-split / user-schedule experiment harness."""


@main.command()
@click.argument("config_path")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, writable=True),
              help="CSV output path.")
@click.option("--realizations", type=int, default=None,
              help="Override the configured realization count.")
@click.option("--seed", type=int, default=None,
              help="Override the configured master seed.")
@click.option("--timing/--no-timing", default=False,
              help="Record wall-clock ms per cell (breaks byte-identical "
                   "reruns); off by default.")
def run(config_path, out_path, realizations, seed, timing):
    """Run the configured sweep and write one CSV row per cell."""
    try:
        sweep = _load(config_path, realizations, seed)
        run_sweep(sweep, out_path, timing=timing)
        click.echo(format_summary(summarize(out_path)), nl=False)
    except (FdschedError, OSError) as e:
        _fail(e)


@main.command()
@click.argument("config_path")
@click.option("--mode", required=True, type=click.Choice(["es-u", "es-j"]),
              help="Which exhaustive oracle to run.")
@click.option("--out", "out_path", default=None,
              type=click.Path(dir_okay=False, writable=True),
              help="Optional CSV output path.")
@click.option("--realizations", type=int, default=None)
@click.option("--seed", type=int, default=None)
def oracle(config_path, out_path, realizations, seed, mode):
    """Run one exhaustive-search oracle over the configured sweep."""
    import tempfile

    try:
        sweep = _load(config_path, realizations, seed)
        sweep = replace(sweep, algorithms=[mode])
        if out_path is None:
            with tempfile.NamedTemporaryFile(suffix=".csv") as tmp:
                run_sweep(sweep, tmp.name)
                click.echo(format_summary(summarize(tmp.name)), nl=False)
        else:
            run_sweep(sweep, out_path)
            click.echo(format_summary(summarize(out_path)), nl=False)
    except (FdschedError, OSError) as e:
        _fail(e)


@main.command("summarize")
@click.argument("csv_path")
def summarize_cmd(csv_path):
    """Aggregate a sweep CSV into per-point per-algorithm means."""
    try:
        click.echo(format_summary(summarize(csv_path)), nl=False)
    except (FdschedError, OSError) as e:
        _fail(e)


@main.command()
@click.argument("config_path")
def validate(config_path):
    """Parse and validate a config file without running anything."""
    try:
        sweep, cfg = load_config(config_path)
    except (FdschedError, OSError) as e:
        _fail(e)
    n_cells = (len(sweep.points()) * sweep.realizations
               * len(sweep.algorithms))
    click.echo(f"OK: m={cfg.m} k_u={cfg.k_u} k_d={cfg.k_d} "
               f"points={len(sweep.points())} "
               f"realizations={sweep.realizations} "
               f"algorithms={','.join(sweep.algorithms)} "
               f"cells={n_cells}")


@main.command("config-reference")
def config_reference_cmd():
    """Print every config key with its default value and meaning."""
    click.echo(config_reference())


@main.command()
@click.option("--m", type=int, default=14, show_default=True)
@click.option("--k-u", type=int, default=5, show_default=True)
@click.option("--k-d", type=int, default=5, show_default=True)
@click.option("--masks", type=int, default=300, show_default=True)
def bench(m, k_u, k_d, masks):
    """Benchmark the compiled objective kernel against pure Python."""
    try:
        click.echo(format_benchmark(
            benchmark_backends(m=m, k_u=k_u, k_d=k_d, n_masks=masks)))
    except (FdschedError, OSError) as e:
        _fail(e)
