import argparse
import json
import math
import sys
import yaml
import numpy as np
import pandas as pd
from pathlib import Path
from scipy.special import hankel1
from typing import Dict, List, Optional, Sequence

from abresolvent.analysis.eigen import (Potential, dense_eigenvalues, disc_family, eigen_bound_sweep,
                                        shallow_well_eigenvalue)
from abresolvent.analysis.grid import GridSpec, resolvent_identity_residual
from abresolvent.analysis.scan import boundary_approximation_gap, sigma_scan
from abresolvent.config import COMMANDS, SUITES, RunConfig, UsageError
from abresolvent.geometry import CirculationProfile, PolarPoint
from abresolvent.kernel import EXPECTED_NORMALIZATION, KernelContext, calibrate_normalization, resolvent_kernel
from abresolvent.ledger import ConstantsLedger, ledger_path
from abresolvent.oscillatory import run_corpus
from abresolvent.regimes import Regime, SpectralParameter
from abresolvent.report import BoundCheckReport, VerificationSuite, reports_to_frame
from abresolvent.specfun import DyadicCutoff, hankel0_plus, split_ab
from abresolvent.utils import ensure_dir
from abresolvent.verify.appendix import AppendixGrid, AppendixSuite, check_appendix_slices
from abresolvent.verify.dyadic import DiffractiveSuite, DirectDyadicSuite, MultiplierSuite
from abresolvent.verify.facts import BracketFactsSuite, RadialEnvelopeSuite, check_phase_derivatives
from abresolvent.verify.schur import SchurSuite, check_q4_divergence


WORST_OFFENDERS = 20
FLOAT_FORMAT = '%.12g'
# acceptance of the eigenvalue cross-check between Birman-Schwinger and the dense eigensolve
EIGEN_MATCH_LIMIT = 1e-4
HANKEL_LIMIT = 1e-9
SPLIT_LIMIT = 1e-10
PARTITION_LIMIT = 1e-12
CALIBRATION_LIMIT = 1e-6
SELFTEST_APPENDIX_GRID = AppendixGrid(n_s=128, n_b=12, n_alpha=9)
# depth of the real unit disc well whose dense ground state is compared with the radial matching value
SHALLOW_WELL_DEPTH = 4.0
SELFTEST_WELL_GRID = GridSpec(0.01, 8.0, 80, 4, 'uniform')
SELFTEST_IDENTITY_GRID = GridSpec(0.2, 2.0, 4, 6)


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'")
# ----------------------------------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='abresolvent',
                                     description='Resolvent kernels of the Aharonov-Bohm Hamiltonian in the plane '
                                                 'and numerical checks of their estimates')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON or YAML run configuration (defaults to config.yaml)')
    common.add_argument('--threads', type=int, help='worker threads')
    common.add_argument('--out', help='output directory')
    common.add_argument('--seed', type=int)
    common.add_argument('--tol', type=float, help='absolute quadrature tolerance')
    common.add_argument('--verbose', action='store_true', help='show progress bars')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('eval-kernel', parents=[common], help='evaluate the resolvent kernel at one point pair')
    p.add_argument('--alpha', type=float)
    p.add_argument('--sigma-re', type=float, required=True)
    p.add_argument('--sigma-im', type=float, required=True)
    p.add_argument('--branch', choices=('+', '-'), help='side of the limit for sigma on (0, inf)')
    p.add_argument('--x', required=True, help='"r,theta"')
    p.add_argument('--y', required=True, help='"r,theta"')
    p.add_argument('--calibrate', action='store_true', help='fit the normalization instead of using 4*pi^3')

    p = sub.add_parser('scan-sigma', parents=[common], help='probe norms over a delta sweep')
    p.add_argument('--alpha', type=float)
    p.add_argument('--p', type=float)
    p.add_argument('--q', type=float)
    p.add_argument('--regime', choices=('i', 'ii', 'iii'))
    p.add_argument('--deltas', type=_float_list)
    p.add_argument('--grid', help='"rmin,rmax,nr,ntheta"')

    p = sub.add_parser('verify-bounds', parents=[common], help='run one verification suite')
    p.add_argument('--suite', choices=SUITES, required=True)
    p.add_argument('--samples', type=int)

    p = sub.add_parser('check-appendix', parents=[common], help='alias of verify-bounds --suite appendix')
    p.add_argument('--samples', type=int)

    p = sub.add_parser('eigen-bounds', parents=[common], help='eigenvalue bound over disc potentials')
    p.add_argument('--alpha', type=float)
    p.add_argument('--gamma', type=float)
    p.add_argument('--count', type=int, help='number of disc potentials')
    p.add_argument('--grid', help='"rmin,rmax,nr,ntheta"')
    p.add_argument('--backend', choices=('matrix', 'kernel'))

    sub.add_parser('selftest', parents=[common], help='deterministic quick checks, writes selftest CSVs')
    return parser
# ----------------------------------------------------------------------------------------------------------------------


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    config_from_args(args)

        Run configuration of the parsed command line: the --config file (or config.yaml) with the
        command line values on top
    """
    base = RunConfig.from_file(args.config) if args.config else RunConfig.default()
    command = 'verify-bounds' if args.command == 'check-appendix' else args.command
    overrides = {"command": command, "threads": args.threads, "output": args.out, "seed": args.seed,
                 "tolerance": args.tol}
    if args.command == 'check-appendix':
        overrides['suite'] = 'appendix'
    for key in ('suite', 'samples', 'p', 'q', 'regime', 'deltas', 'gamma', 'count', 'backend', 'calibrate',
                'sigma_re', 'sigma_im', 'branch', 'x', 'y'):
        value = getattr(args, key, None)
        if value is not None and value is not False:
            overrides[key] = value
    config = base.with_overrides(**overrides)
    if getattr(args, 'alpha', None) is not None:
        config.profile = {"type": "constant", "alpha": float(args.alpha)}
    if getattr(args, 'grid', None):
        grid = GridSpec.from_string(args.grid, config.grid.get('spacing', 'log')).to_dict()
        if command == 'eigen-bounds':
            config.params['eigen_grid'] = grid
        else:
            config.grid = grid
    return config
# ----------------------------------------------------------------------------------------------------------------------


def write_json(data: Dict,
               path: Path):
    with open(path, 'w') as file:
        file.write(json.dumps(data, indent=2, sort_keys=True))
        file.write('\n')
# ----------------------------------------------------------------------------------------------------------------------


def write_csv(table: pd.DataFrame,
              path: Path):
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
# ----------------------------------------------------------------------------------------------------------------------


def write_reports(reports: Sequence[BoundCheckReport],
                  config: RunConfig,
                  name: str) -> bool:
    """
    write_reports(reports, config, name)

        Writes {name}.json (summary per claim) and {name}_worst.csv (worst offenders of every claim)
        into the output directory and appends the constants to the ledger

        Returns
        -------
        bool
            True when every report passed
    """
    out = ensure_dir(config.output)
    summary = {"command": config.command,
               "config_hash": config.config_hash(),
               "reports": [report.to_summary() for report in reports],
               "verdict": "pass" if all(r.verdict for r in reports) else "fail"}
    write_json(summary, out / f"{name}.json")
    worst = [r.worst_offenders(WORST_OFFENDERS) for r in reports]
    worst = [w for w in worst if not w.empty]
    write_csv(pd.concat(worst, ignore_index=True) if worst else pd.DataFrame(), out / f"{name}_worst.csv")
    ledger = ConstantsLedger(str(ledger_path(output=config.output)))
    ledger.record(reports, config.config_hash())
    for report in reports:
        print(f"{report.claim_id}: {'pass' if report.verdict else 'FAIL'}, constant = {report.max_ratio:.6g}, "
              f"samples = {report.sample_count}")
    return all(r.verdict for r in reports)
# ----------------------------------------------------------------------------------------------------------------------


def make_suite(name: str,
               config: RunConfig,
               verbose: bool) -> VerificationSuite:
    threads = config.threads
    if name == 'direct':
        return DirectDyadicSuite(tol=config.tolerance, verbose=verbose, threads=threads)
    if name == 'multiplier':
        return MultiplierSuite(tol=config.tolerance, verbose=verbose, threads=threads)
    if name == 'diffractive':
        return DiffractiveSuite(tol=config.tolerance, verbose=verbose, threads=threads)
    if name == 'schur':
        return SchurSuite(p=float(config.param('p', 1.2)), q=float(config.param('q', 6.0)),
                          verbose=verbose, threads=threads)
    if name == 'appendix':
        return AppendixSuite(verbose=verbose, threads=threads)
    if name == 'bfacts':
        return BracketFactsSuite(verbose=verbose, threads=threads)
    if name == 'lemma3':
        return RadialEnvelopeSuite(verbose=verbose, threads=threads)
    raise UsageError(f"suite must be one of {SUITES}, got '{name}'")
# ----------------------------------------------------------------------------------------------------------------------


def run_eval_kernel(config: RunConfig,
                    verbose: bool) -> int:
    sigma = config.spectral_parameter()
    x = PolarPoint.from_string(config.param('x'))
    y = PolarPoint.from_string(config.param('y'))
    normalization = None if config.param('calibrate', False) else EXPECTED_NORMALIZATION
    context = KernelContext(tol=config.tolerance, normalization=normalization, threads=config.threads,
                            verbose=verbose)
    value = resolvent_kernel(config.profile_object(), sigma, x, y, context)
    data = value.to_dict()
    data['normalization'] = context.normalization
    out = ensure_dir(config.output)
    write_json(data, out / 'eval_kernel.json')
    print(json.dumps(data, sort_keys=True))
    return 0
# ----------------------------------------------------------------------------------------------------------------------


def run_scan_sigma(config: RunConfig,
                   verbose: bool) -> int:
    q = config.param('q')
    q = math.inf if q in ('inf', math.inf) else float(q)
    regime = Regime.from_label(config.param('regime'))
    deltas = [float(d) for d in config.param('deltas')]
    profile = config.profile_object()
    context = KernelContext(tol=config.tolerance, normalization=EXPECTED_NORMALIZATION,
                            boundary_approximation=False, threads=config.threads, verbose=verbose)
    result = sigma_scan(profile, float(config.param('p')), q, regime, deltas, grid=config.grid_spec(),
                        context=context, threads=config.threads, verbose=verbose)
    out = ensure_dir(config.output)
    write_csv(result.table, out / 'scan_sigma.csv')
    write_csv(result.summary, out / 'scan_sigma_summary.csv')
    summary = {"command": config.command,
               "config_hash": config.config_hash(),
               "norms": {str(k): float(v) for k, v in result.norms.items()},
               "spread": result.spread,
               "failures": result.failures,
               "contrast_slope": result.contrast_slope,
               "max_duality_gap": float(result.summary['duality_gap'].max()),
               "verdict": "pass" if result.verdict else "fail"}
    if regime == Regime.BOUNDARY:
        gap = boundary_approximation_gap(profile, deltas, context=context)
        write_csv(gap, out / 'scan_sigma_boundary.csv')
        summary['max_boundary_gap'] = float(gap['relative_gap'].max()) if not gap.empty else None
    write_json(summary, out / 'scan_sigma.json')
    ledger = ConstantsLedger(str(ledger_path(output=config.output)))
    ledger.write(f"probe_norm_spread_{regime.label}", result.spread, config.config_hash(), len(deltas),
                 result.verdict)
    ledger.write(f"scan_assembly_failures_{regime.label}", result.failures, config.config_hash(), len(deltas),
                 result.failures == 0)
    print(f"Probe norm spread over deltas: {result.spread:.4g} ({summary['verdict']})")
    return 0 if result.verdict else 1
# ----------------------------------------------------------------------------------------------------------------------


def run_verify_bounds(config: RunConfig,
                      verbose: bool) -> int:
    suite_name = config.param('suite')
    suite = make_suite(suite_name, config, verbose)
    reports = suite.run(int(config.param('samples', 10000)), config.seed)
    passed = write_reports(reports, config, f"verify_{suite_name}")
    return 0 if passed else 1
# ----------------------------------------------------------------------------------------------------------------------


def run_eigen_bounds(config: RunConfig,
                     verbose: bool) -> int:
    potentials = disc_family(int(config.param('count', 20)), seed=config.seed)
    grid = GridSpec.from_dict(config.param('eigen_grid')) if config.param('eigen_grid') else None
    context = KernelContext(tol=config.tolerance, normalization=EXPECTED_NORMALIZATION)
    sweep = eigen_bound_sweep(config.profile_object(), potentials, gamma=float(config.param('gamma', 0.5)),
                              grid=grid, backend=config.param('backend', 'matrix'), context=context,
                              threads=config.threads, verbose=verbose)
    out = ensure_dir(config.output)
    write_csv(sweep.table, out / 'eigen_bounds.csv')
    match = BoundCheckReport.from_tolerance('eigenvalue_dense_match',
                                            pd.DataFrame([{"potentials": len(potentials), "ratio": sweep.mismatch}]),
                                            EIGEN_MATCH_LIMIT)
    if sweep.failures:
        write_json({"failures": sweep.failures}, out / 'eigen_bounds_failures.json')
        print(f"Eigenvalue search reported {len(sweep.failures)} failures")
    passed = write_reports([sweep.report, match], config, 'eigen_bounds')
    return 0 if passed else 1
# ----------------------------------------------------------------------------------------------------------------------


def selftest_specfun() -> pd.DataFrame:
    """Series/asymptotic H₀⁺ against scipy, split reconstruction and dyadic partition sum on a log grid."""
    r = np.geomspace(1e-3, 50.0, 64)
    ours = hankel0_plus(r)
    reference = hankel1(0, r)
    split = split_ab(r)
    reconstructed = split.reconstruct()
    partition = DyadicCutoff.partition_sum(r)
    return pd.DataFrame({"r": r,
                         "h_re": ours.real, "h_im": ours.imag,
                         "ref_re": reference.real, "ref_im": reference.imag,
                         "rel_error": np.abs(ours - reference) / np.abs(reference),
                         "split_error": np.abs(reconstructed - split.full) / np.abs(split.full),
                         "partition_error": np.abs(partition - 1.0)})
# ----------------------------------------------------------------------------------------------------------------------


def _error_table(specfun: pd.DataFrame,
                 column: str) -> pd.DataFrame:
    return specfun[['r', column]].rename(columns={column: 'ratio'})
# ----------------------------------------------------------------------------------------------------------------------


def selftest_checks(specfun: pd.DataFrame,
                    config: RunConfig,
                    verbose: bool) -> List[BoundCheckReport]:
    reports = [BoundCheckReport.from_tolerance('hankel_accuracy', _error_table(specfun, 'rel_error'), HANKEL_LIMIT),
               BoundCheckReport.from_tolerance('hankel_split', _error_table(specfun, 'split_error'), SPLIT_LIMIT),
               BoundCheckReport.from_tolerance('dyadic_partition', _error_table(specfun, 'partition_error'),
                                               PARTITION_LIMIT)]

    context = KernelContext(tol=config.tolerance, radial_method='hankel')
    value, variance = calibrate_normalization(context, pairs=100, seed=config.seed)
    calibration = pd.DataFrame([{"normalization": value, "expected": EXPECTED_NORMALIZATION,
                                 "ratio": math.sqrt(variance)}])
    reports.append(BoundCheckReport.from_tolerance('free_calibration', calibration, CALIBRATION_LIMIT))

    corpus = run_corpus(lambdas=[2.0 ** k for k in range(4, 9)], threads=config.threads, verbose=verbose)
    reports.append(BoundCheckReport.from_samples('oscillatory_corpus', corpus, trend_column='lambda'))
    reports.extend(check_appendix_slices(SELFTEST_APPENDIX_GRID))
    reports.append(check_q4_divergence())
    reports.append(check_phase_derivatives(samples=200, seed=config.seed))
    reports.extend(discretization_checks(config, verbose=verbose))
    return reports
# ----------------------------------------------------------------------------------------------------------------------


def discretization_checks(config: RunConfig,
                          well_grid: GridSpec = SELFTEST_WELL_GRID,
                          identity_grid: GridSpec = SELFTEST_IDENTITY_GRID,
                          verbose: bool = False) -> List[BoundCheckReport]:
    """
    discretization_checks(config, well_grid, identity_grid, verbose)

        Recorded diagnostics of the grid discretization: the relative error of the dense ground state
        of −Δ − κ𝟙_{|x|≤1} against the radial matching value, and the resolvent identity residual of
        the assembled kernel at σ1 = −1, σ2 = −2 for α = 0 and α = 1/2

        Returns
        -------
        List[BoundCheckReport]
            claims 'shallow_well_ground_state' and 'resolvent_identity'
    """
    exact = shallow_well_eigenvalue(SHALLOW_WELL_DEPTH)
    dense = dense_eigenvalues(CirculationProfile.constant(0.0), Potential.disc(1.0, -SHALLOW_WELL_DEPTH), well_grid)
    ground = float(dense[0].real) if dense.size else math.nan
    well = pd.DataFrame([{"exact": exact, "dense": ground, "ratio": abs(ground - exact) / abs(exact)}])
    print(f"Shallow well: dense ground state {ground:.6g}, radial matching {exact:.6g}")

    context = KernelContext(tol=config.tolerance, radial_method='hankel', normalization=EXPECTED_NORMALIZATION)
    rows = []
    for alpha in (0.0, 0.5):
        residual = resolvent_identity_residual(CirculationProfile.constant(alpha), -1.0, -2.0, identity_grid,
                                               context, verbose=verbose)
        rows.append({"alpha": alpha, "sigma1": -1.0, "sigma2": -2.0, "ratio": residual})
    return [BoundCheckReport.from_samples('shallow_well_ground_state', well),
            BoundCheckReport.from_samples('resolvent_identity', pd.DataFrame(rows))]
# ----------------------------------------------------------------------------------------------------------------------


def run_selftest(config: RunConfig,
                 verbose: bool) -> int:
    out = ensure_dir(config.output)
    specfun = selftest_specfun()
    write_csv(specfun, out / 'selftest_specfun.csv')
    reports = selftest_checks(specfun, config, verbose)
    write_csv(reports_to_frame(reports), out / 'selftest_checks.csv')
    passed = write_reports(reports, config, 'selftest')
    return 0 if passed else 1
# ----------------------------------------------------------------------------------------------------------------------


HANDLERS = {'eval-kernel': run_eval_kernel,
            'scan-sigma': run_scan_sigma,
            'verify-bounds': run_verify_bounds,
            'eigen-bounds': run_eigen_bounds,
            'selftest': run_selftest}


def run(config: RunConfig,
        verbose: bool = False) -> int:
    """
    run(config, verbose)

        Validates the configuration and dispatches to the command; returns 0 when every asserted
        check passed and 1 otherwise. Raises UsageError for an invalid configuration

        Parameters
        ----------
        config: RunConfig
        verbose: bool

        Returns
        -------
        int
    """
    config.validate()
    command = 'verify-bounds' if config.command == 'check-appendix' else config.command
    if command not in HANDLERS:
        raise UsageError(f"command must be one of {COMMANDS}, got '{config.command}'")
    return HANDLERS[command](config, verbose)
# ----------------------------------------------------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    main(argv)

        Exit status 0 when every asserted check passes, 1 when a check fails or the computation
        raises, 2 on a usage error in the command line or the run configuration
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args).validate()
    except (ValueError, TypeError, FileNotFoundError, yaml.YAMLError) as error:
        print(f"{parser.prog}: usage error: {error}", file=sys.stderr)
        return 2
    try:
        return run(config, verbose=args.verbose)
    except UsageError as error:
        print(f"{parser.prog}: usage error: {error}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, ValueError) as error:
        print(f"{parser.prog}: error: {type(error).__name__}: {error}", file=sys.stderr)
        return 1
# ----------------------------------------------------------------------------------------------------------------------
