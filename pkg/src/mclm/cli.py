"""Command-line driver.

Exit codes: 0 success, 1 error (including invalid configs and failed
checks), 2 run terminated by the blow-up monitor.
"""
from __future__ import annotations

import sys

import click

from . import harness
from .errors import MCLMError
from .verify import SUITES, run_suite


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(harness.EXIT_ERROR)


def _load(path):
    from .config import load_config
    try:
        return load_config(path)
    except MCLMError as exc:
        _fail(str(exc))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Modified CLM simulator on the circle."""


@main.command("run")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--output-dir", default=None, help="Override the config's output_dir.")
def run_command(config, output_dir):
    """Integrate one configuration and write manifest.json and series.csv."""
    cfg = _load(config)
    try:
        manifest, out = harness.run(cfg, output_dir)
    except MCLMError as exc:
        _fail(str(exc))
    click.echo(f"termination: {manifest.termination_cause}  {manifest.message}".rstrip())
    click.echo(f"output: {out}")
    sys.exit(manifest.exit_code)


@main.command("verify")
@click.argument("suite")
@click.option("--seed", default=0, show_default=True, type=int)
def verify_command(suite, seed):
    """Run a verification suite: symbols, operators, geodesic or all."""
    if suite != "all" and suite not in SUITES:
        _fail(f"unknown suite {suite!r}; choose from {', '.join([*SUITES, 'all'])}")
    checks = run_suite(suite, seed)
    for check in checks:
        click.echo(check.line())
    failed = sum(not c.passed for c in checks)
    click.echo(f"{len(checks) - failed}/{len(checks)} checks passed")
    sys.exit(harness.EXIT_ERROR if failed else harness.EXIT_OK)


@main.command("convergence")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--dts", required=True,
              help="Comma-separated step sizes in ratio 2, e.g. 4e-3,2e-3,1e-3.")
def convergence_command(config, dts):
    """Temporal self-convergence study against a dt/4 reference."""
    cfg = _load(config)
    try:
        values = [float(s) for s in dts.split(",") if s.strip()]
    except ValueError:
        _fail(f"dts: cannot parse {dts!r}")
    try:
        report = harness.convergence(cfg, values)
    except MCLMError as exc:
        _fail(str(exc))
    click.echo(report.table())


@main.command("cross-validate")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--tol", default=1e-6, show_default=True, type=float)
def cross_validate_command(config, tol):
    """Compare the velocity-form and Lagrangian integrations of one config."""
    cfg = _load(config)
    try:
        deviation = harness.cross_validate_config(cfg)
    except MCLMError as exc:
        _fail(str(exc))
    ok = deviation <= tol
    click.echo(f"max deviation = {deviation:.6e} (tol {tol:.1e}) {'PASS' if ok else 'FAIL'}")
    sys.exit(harness.EXIT_OK if ok else harness.EXIT_ERROR)


if __name__ == "__main__":
    main()
