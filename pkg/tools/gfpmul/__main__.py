import random
import time
from dataclasses import asdict
from pathlib import Path

import click
import psutil

from lib import counters
from lib.costmodel import (
    TimingProfile,
    plan_expected_count,
    ssa_count,
    table_report,
)
from lib.errors import InputFormatError, OracleMismatch
from lib.formats import (
    format_hex,
    primes_for_size,
    read_hex,
    read_prime_table,
    record_line,
)
from lib.gfp import make_params
from lib.multiplier import (
    PlanConfig,
    multiply,
    parse_plan,
    plan_parameters,
    precompute,
    precompute_from_levels,
    serialize_plan,
)
from lib.primes import (
    DensityParams,
    SearchWindow,
    c_lambda_report,
    count_gfp,
    density_rows,
    hypothesis_window_check,
    min_base,
    next_gfp,
)
from lib.reference import oracle_product
from lib.selfcheck import run_selfcheck
from settings import settings
from tools.gfpmul.constants import (
    BUDGET_OPTIONS,
    DEFAULT_COST_PRIMES,
    DEFAULT_SEED,
    DENSITY_LAMBDAS,
    OUTPUT_FORMATS,
)
from tools.gfpmul.utils import (
    configure_logging,
    emit,
    power_of_two,
    report_errors,
)


def primality_options() -> dict:
    return {
        'rounds': settings['mr_rounds'],
        'trial_bound': settings['trial_division_bound'],
    }


@click.group()
@click.option('--verbose', is_flag=True, help='Log at debug level')
@click.option(
    '--jobs',
    type=click.IntRange(min=1),
    envvar='GFPMUL_JOBS',
    help='Worker processes for prime counting',
)
@click.option(
    '--format',
    'output_format',
    default='text',
    type=click.Choice(OUTPUT_FORMATS),
)
@click.pass_context
def main(ctx, verbose: bool, jobs: int | None, output_format: str) -> None:
    configure_logging(verbose or settings['debug_logging'])
    ctx.obj = {
        'jobs': jobs or settings['jobs'],
        'format': output_format,
    }


@main.command()
@click.argument('file_a', type=click.Path(exists=True, dir_okay=False))
@click.argument('file_b', type=click.Path(exists=True, dir_okay=False))
@click.option(
    '--plan',
    'plan_file',
    type=click.Path(exists=True, dir_okay=False),
    help='Serialized plan to multiply with',
)
@click.option('--check', is_flag=True, help='Compare with the oracle')
@report_errors
def mul(file_a: str, file_b: str, plan_file: str | None, check: bool):
    """Multiply two hexadecimal integers."""
    a, b = read_hex(file_a), read_hex(file_b)
    config = PlanConfig.from_settings()
    if plan_file:
        multiply_plan = precompute_from_levels(
            parse_plan(Path(plan_file).read_text()), config
        )
    else:
        multiply_plan = precompute(
            max(a.bit_length(), b.bit_length(), 1), config
        )

    product = multiply(a, b, multiply_plan)
    if check and product != oracle_product(a, b):
        raise OracleMismatch('Product differs from the schoolbook oracle')
    click.echo(format_hex(product))


@main.command('primes-search')
@click.option('--lambda', 'lam', type=click.IntRange(min=1), required=True)
@click.option('--min-bits', type=click.IntRange(min=1), required=True)
@click.pass_context
@report_errors
def primes_search(ctx, lam: int, min_bits: int):
    """Smallest even r with r^(2^lambda) >= 2^min_bits giving a prime."""
    r = next_gfp(
        min_base(lam, min_bits),
        lam,
        scan_limit=settings['scan_ceiling'],
        **primality_options(),
    )
    params = make_params(r, lam)
    fields = {'r': r, 'lambda': lam, 'bits': params.p.bit_length()}
    if ctx.obj['format'] == 'records':
        click.echo(record_line('prime', fields))
    else:
        click.echo(f'r={r} p={params} bits={fields["bits"]}')


@main.command('primes-count')
@click.option('--lambda', 'lam', type=click.IntRange(min=1), required=True)
@click.option('--lo', type=click.IntRange(min=0), required=True)
@click.option('--hi', type=click.IntRange(min=0), required=True)
@click.pass_context
@report_errors
def primes_count(ctx, lam: int, lo: int, hi: int):
    """Number of even r in [lo, hi] with r^(2^lambda)+1 prime."""
    window = SearchWindow(lam, lo, hi)
    count = count_gfp(window, jobs=ctx.obj['jobs'], **primality_options())
    fields = {'lambda': lam, 'lo': lo, 'hi': hi, 'count': count}
    if ctx.obj['format'] == 'records':
        click.echo(record_line('count', fields))
    else:
        click.echo(f'count={count}')


@main.command()
@click.option('--lambda', 'lambdas', type=click.IntRange(min=1), multiple=True)
@click.option('--K', 'K', type=click.IntRange(min=0), help='Prime cutoff')
@click.option(
    '--table1',
    '--survey',
    'table1',
    is_flag=True,
    help='Counts against estimates',
)
@click.option('--window', is_flag=True, help='Check the prime windows')
@click.option('--samples', default=2, type=click.IntRange(min=2))
@click.pass_context
@report_errors
def density(
    ctx, lambdas, K: int | None, table1: bool, window: bool, samples: int
):
    """Bateman-Horn constant and expected number of primes."""
    K = settings['density_k'] if K is None else K
    output_format = ctx.obj['format']
    if table1:
        rows = density_rows(lambdas or DENSITY_LAMBDAS, K, ctx.obj['jobs'])
        emit(
            output_format,
            'density.txt.j2',
            'density',
            [row.as_record() for row in rows],
            [asdict(row) for row in rows],
        )
        return
    if not lambdas:
        raise click.UsageError('--lambda is required without --table1')

    for lam in lambdas:
        report = c_lambda_report(
            DensityParams(lam, K, settings['gamma_shape'])
        )
        fields = {
            'lambda': lam,
            'K': K,
            'constant': report.value,
            'constant_2K': report.value_2k,
            'stabilization': report.stabilization,
        }
        if output_format == 'records':
            click.echo(record_line('constant', fields))
        else:
            click.echo(
                f'lambda={lam} C={report.value:.4f} '
                f'(K={K}; {report.value_2k:.4f} at 2K)'
            )
        if window:
            _print_windows(lam, samples, output_format)


def _print_windows(lam: int, samples: int, output_format: str) -> None:
    report = hypothesis_window_check(lam, settings['gamma_shape'], samples)
    for sample in report.samples:
        fields = {
            'lambda': lam,
            'lo': sample.x,
            'hi': sample.hi,
            'found': sample.found,
            'r': sample.first_r,
        }
        if output_format == 'records':
            click.echo(record_line('window', fields))
        else:
            found = f'r={sample.first_r}' if sample.found else 'none'
            click.echo(f'  [{sample.x}, {sample.hi}]: {found}')


@main.command()
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option(
    '--primes',
    'primes_file',
    type=click.Path(exists=True, dir_okay=False),
    help='Lines "[min_bits max_bits] r lambda"',
)
@click.option(
    '--profile',
    'profile_file',
    type=click.Path(exists=True, dir_okay=False),
    help='Lines "bits=<b> seconds=<s>"',
)
@click.option(
    '--budget', default='coefficient', type=click.Choice(BUDGET_OPTIONS)
)
@click.pass_context
@report_errors
def cost(ctx, n: int, primes_file, profile_file, budget: str):
    """Expensive multiplications and Kronecker sizes for each prime."""
    if primes_file:
        primes = read_prime_table(primes_file)
    else:
        primes = primes_for_size(DEFAULT_COST_PRIMES, n)
    if not primes:
        raise InputFormatError(f'No primes listed for n={n}; use --primes')
    profile = None
    if profile_file:
        profile = TimingProfile.parse(Path(profile_file).read_text())

    reports = table_report(n, primes, profile, budget)
    rows = [
        {
            **report.as_dict(),
            'prime': report.prime,
            'big_n_label': power_of_two(report.big_n),
            'count_label': (
                f'{power_of_two(report.big_n)}*{report.count_factor}'
            ),
        }
        for report in reports
    ]
    emit(
        ctx.obj['format'],
        'cost.txt.j2',
        'cost',
        [report.as_dict() for report in reports],
        rows,
        n=n,
        timed=profile is not None,
        ssa=power_of_two(ssa_count(n)),
    )


@main.command()
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@report_errors
def plan(n: int):
    """Print the level chain used for n-bit operands."""
    multiply_plan = plan_parameters(n, PlanConfig.from_settings())
    if not multiply_plan.levels:
        click.echo(f'# {n} bits are multiplied directly')
        return
    click.echo(serialize_plan(multiply_plan), nl=False)


@main.command()
@click.option('--samples', default=100, type=click.IntRange(min=1))
@click.option('--seed', default=DEFAULT_SEED, type=int)
@click.pass_context
@report_errors
def selfcheck(ctx, samples: int, seed: int):
    """Compare every layer with the brute-force oracles."""
    results = run_selfcheck(samples, seed)
    records = [
        {
            'name': result.name,
            'samples': result.samples,
            'failures': result.failures,
            'passed': result.passed,
        }
        for result in results
    ]
    emit(ctx.obj['format'], 'selfcheck.txt.j2', 'check', records)
    if not all(result.passed for result in results):
        raise OracleMismatch('Self-check failed')


@main.command()
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option('--reps', default=1, type=click.IntRange(min=1))
@click.option('--seed', default=DEFAULT_SEED, type=int)
@click.pass_context
@report_errors
def bench(ctx, n: int, reps: int, seed: int):
    """Time multiplications and print the operation counters."""
    rng = random.Random(seed)
    multiply_plan = precompute(n, PlanConfig.from_settings())
    pairs = [(rng.getrandbits(n), rng.getrandbits(n)) for _ in range(reps)]

    start = time.perf_counter()
    with counters.counting() as counter:
        for a, b in pairs:
            multiply(a, b, multiply_plan)
    elapsed = time.perf_counter() - start

    records = [
        {'level': level, **counter.report(level).as_dict()}
        for level in counter.levels()
    ]
    emit(
        ctx.obj['format'],
        'bench.txt.j2',
        'counters',
        records,
        n=n,
        reps=reps,
        expected=plan_expected_count(multiply_plan),
    )
    rss = psutil.Process().memory_info().rss
    click.echo(
        f'time: wall={elapsed:.3f}s per_mul={elapsed / reps:.3f}s '
        f'rss={rss / 2**20:.1f}MiB'
    )


if __name__ == '__main__':
    main()
