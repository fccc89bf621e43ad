# backend/api/cli.py
"""
semicech command line
Exit status: 0 when every check passed, 1 when a mathematical check failed,
2 on input errors and when an enumeration guard refuses the input.
"""

from typing import Any, Callable, Dict, Optional

import click

from backend.api.commands import command_runner
from backend.api.errors import InputError
from backend.api.report_generator import FORMATS, report_generator
from backend.api.settings import configure_logging, settings
from backend.models.report import RunReport, RunStatus
from backend.storage.loaders import compute_digest, read_document

SEMIRINGS = ("boolean", "qmax", "zmax", "nat")


def _load(path: Optional[str]) -> Optional[Dict[str, Any]]:
    return None if path is None else read_document(path)


def _emit(report: RunReport, fmt: str) -> None:
    click.echo(report_generator.render(report, fmt), nl=False)
    raise SystemExit(report.exit_code)


def _guarded(command: str, fmt: str, action: Callable[[], RunReport]) -> None:
    """Run an action, turning unreadable input files into an error report"""
    try:
        report = action()
    except InputError as e:
        report = RunReport(command=command, inputs_digest=compute_digest({}), status=RunStatus.ERROR, error=e.to_dict())
    _emit(report, fmt)


format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="human", show_default=True, help="Report format")
seed_option = click.option("--seed", type=int, default=None, help="Seed for randomized checks")
bound_option = click.option("--bound", type=int, default=None, help="Override the enumeration guard for this run")


@click.group()
@click.option("--log-level", default=None, help="Logging level (default from SEMICECH_LOG_LEVEL)")
def main(log_level: Optional[str]):
    """Cech cohomology of semiring schemes with certified results."""
    configure_logging(log_level)


@main.command()
@click.argument("document", required=False, type=click.Path())
@click.option("--semiring", type=click.Choice(SEMIRINGS), default="qmax", show_default=True)
@click.option("--n", "n", type=int, default=None, help="Dimension of projective space when no document is given")
@click.option("--samples", type=int, default=25, show_default=True, help="Random cocycles per degree in projective mode")
@click.option("--degree", default=None, help="Degree k or range lo..hi to report")
@format_option
@seed_option
@bound_option
def cohomology(document, semiring, n, samples, degree, fmt, seed, bound):
    """Cohomology of a finite complex, a cover with a sheaf, or O on P^n."""
    _guarded("cohomology", fmt, lambda: command_runner.cohomology(_load(document), n, semiring, samples, seed, bound, degree))


@main.command()
@click.argument("cocycle", required=False, type=click.Path())
@click.option("--semiring", type=click.Choice(("boolean", "qmax", "zmax")), default="qmax", show_default=True)
@click.option("--n", "n", type=int, default=None)
@format_option
@seed_option
def picard(cocycle, semiring, n, fmt, seed):
    """Classify a unit cocycle on P^n, or print the Pic = Z self-test table."""
    _guarded("picard", fmt, lambda: command_runner.picard(n, semiring, _load(cocycle), seed))


@main.command()
@click.argument("verb", type=click.Choice(("primes", "cover", "contract")))
@click.argument("document", type=click.Path())
@format_option
@seed_option
@bound_option
def affine(verb, document, fmt, seed, bound):
    """Prime ideals, cover certificates and O* contractions on affine pieces."""
    _guarded(f"affine {verb}", fmt, lambda: command_runner.affine(verb, _load(document), seed, bound))


@main.command()
@click.argument("verb", type=click.Choice(("golan", "pr")))
@click.argument("document", required=False, type=click.Path())
@click.option("--semiring", type=click.Choice(SEMIRINGS), default=None, help="Builtin for the symbolic golan rule")
@format_option
@bound_option
def tensor(verb, document, semiring, fmt, bound):
    """Golan collapse or the Pareigis-Rohrl tensor of finite semimodules."""

    def action() -> RunReport:
        doc = _load(document) or {}
        if semiring is not None:
            doc = {**doc, "builtin": semiring}
        return command_runner.tensor(verb, doc, bound)

    _guarded(f"tensor {verb}", fmt, action)


@main.group()
def check():
    """Consistency checks on input documents."""


@check.command("complex")
@click.argument("document", type=click.Path())
@click.option("--samples", type=int, default=None)
@format_option
def check_complex(document, samples, fmt):
    """Verify the chain identity of a finite +- complex in every degree."""
    _guarded("check complex", fmt, lambda: command_runner.check_complex(_load(document), samples))


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("backend.api.main:app", host=host or settings.api_host, port=port or settings.api_port)


if __name__ == "__main__":
    main()
