"""Command-line entry point: ``filamentlab run CONFIG...``."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import click

from .config import load_config, schema
from .errors import ConfigParse
from .experiments import REGISTRY, run_experiment

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def bundled_configs() -> dict[str, Path]:
    root = resources.files("filamentlab") / "configs"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".toml")}


def _resolve(ref: str) -> Path:
    path = Path(ref)
    if path.is_file():
        return path
    bundled = bundled_configs()
    if ref in bundled:
        return bundled[ref]
    raise ConfigParse(f"no config file {ref!r} and no bundled config of that name")


def _run_one(path: str, out_dir: str) -> tuple[str, bool, list[str]]:
    cfg = load_config(path)
    result = run_experiment(cfg, out_dir)
    lines = []
    for c in result.checks:
        flag = "PASS" if c.passed else "FAIL"
        lines.append(f"  [{flag}] {c.name}: value={c.value:.10g} expected={c.expected:.10g} tol={c.tol:g}")
    if result.error:
        lines.append(f"  [ERROR] {result.error}")
    lines.append(f"  summary: {Path(out_dir) / 'summary.json'} ({result.wall_time:.2f} s)")
    return cfg.experiment, result.passed, lines


@click.group(invoke_without_command=True)
@click.option("--list-experiments", is_flag=True, help="List experiment names and exit.")
@click.option("--print-schema", is_flag=True, help="Print the config schema as JSON and exit.")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
@click.pass_context
def main(ctx, list_experiments: bool, print_schema: bool, verbose: bool):
    """Vortex filament experiments: induction dynamics, NLS fields, loop energetics."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if list_experiments:
        for name, spec in sorted(REGISTRY.items()):
            click.echo(f"{name:22s} {spec.description}")
        ctx.exit(EXIT_OK)
    if print_schema:
        click.echo(json.dumps(schema(), indent=2, sort_keys=True, default=str))
        ctx.exit(EXIT_OK)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command()
@click.argument("configs", nargs=-1, required=True)
@click.option("--output-dir", type=click.Path(file_okay=False), help="Where to write results.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Parallel processes.")
def run(configs, output_dir, jobs: int):
    """Run experiments from CONFIGS (TOML paths or bundled config names).

    Exit status is 0 only if every check of every experiment passes.
    """
    jobs_list = []
    try:
        for ref in configs:
            path = _resolve(ref)
            cfg = load_config(path)
            if output_dir is None:
                out = Path(cfg.output_dir or Path("runs") / cfg.experiment)
            elif len(configs) == 1:
                out = Path(output_dir)
            else:
                out = Path(output_dir) / path.stem
            jobs_list.append((str(path), str(out)))
    except ConfigParse as exc:
        click.echo(f"config error: {exc}", err=True)
        raise SystemExit(EXIT_CONFIG)

    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, *zip(*jobs_list)))
    else:
        results = [_run_one(p, o) for p, o in jobs_list]

    ok = True
    for name, passed, lines in results:
        click.echo(f"{name}: {'PASS' if passed else 'FAIL'}")
        for line in lines:
            click.echo(line)
        ok &= passed
    raise SystemExit(EXIT_OK if ok else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
