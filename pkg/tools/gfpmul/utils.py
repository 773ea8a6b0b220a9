import functools
import logging
import sys

import click
from jinja2 import Environment, FileSystemLoader

from lib.errors import GfpmulError
from lib.formats import record_line
from tools.gfpmul.constants import TEMPLATES_DIR


def render(template_name: str, **context) -> str:
    templating_environment = Environment(
        loader=FileSystemLoader(TEMPLATES_DIR)
    )
    templating_environment.lstrip_blocks = True
    templating_environment.trim_blocks = True

    template = templating_environment.get_template(template_name)
    return template.render(**context).rstrip('\n')


def emit(
    output_format: str,
    template_name: str,
    kind: str,
    records: list[dict],
    rows=None,
    **context,
) -> None:
    """Print an aligned table, or one record line per entry."""
    if output_format == 'records':
        for record in records:
            click.echo(record_line(kind, record))
        return
    rows = records if rows is None else rows
    click.echo(render(template_name, rows=rows, **context))


def power_of_two(x: int) -> str:
    if x > 0 and not x & (x - 1):
        return f'2^{x.bit_length() - 1}'
    return str(x)


def configure_logging(verbose: bool) -> None:
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def report_errors(func):
    """Exit with status 1 and a red message on any operation error."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except GfpmulError as e:
            click.secho(f'Error: {e}', fg='red', err=True)
            sys.exit(1)

    return wrapper
