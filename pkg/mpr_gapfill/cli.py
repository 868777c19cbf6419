#!/usr/bin/env python3
"""
Command-line interface for the MPR gap-filling package.

Subcommands:
1. fill - fill the gaps of one raster with MPR, SV-MPR (BST/SST) or IDW
2. validate - thinning experiment comparing several methods
3. calibrate - build or show the cached calibration curve
4. idw - IDW baseline fill
5. synth - generate a synthetic heterogeneous field
6. radius - minimum IDW radius covering every missing site
7. heatmap - render a raster as a PGM/PPM image
"""

import sys
import json
import argparse
import logging
from dataclasses import replace
from typing import List, Optional

import colorama
from colorama import Fore, Style
from dotenv import load_dotenv

from .baseline import min_full_coverage_radius
from .calibration import load_or_build_curve, save_curve
from .config import Method, RunConfig
from .exceptions import ConfigError, GapFillError
from .pipeline import GapFiller
from .raster import emit_heatmap, load_raster, write_raster, write_trace
from .utils import ensure_parent_dir, setup_logging
from .validation import (Regime, RegimeLayout, SyntheticFieldSpec, ThinningSpec, compare_methods,
                         generate_synthetic_field)

# Initialize colorama
colorama.init(autoreset=True)

logger = logging.getLogger('mpr_gapfill')


def _logging_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('Logging Parameters')
    group.add_argument('--verbose', action='store_true', help='Enable verbose logging')
    group.add_argument('--full-debug', action='store_true',
                       help='Enable full debug logging (including per-sweep energies)')
    group.add_argument('--log-file', type=str, help='Path to save log file')
    group.add_argument('--no-progress', action='store_true', help='Hide progress bars')
    return parent


def _run_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('Run Parameters')
    group.add_argument('--seed', type=int, help='Master seed (default: 0)')
    group.add_argument('--threads', type=int,
                       help='Worker threads; results do not depend on it (default: $MPR_THREADS or 1)')
    return parent


def _model_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    model = parent.add_argument_group('Model Parameters')
    model.add_argument('--q', type=float, help='Modification parameter q in (0, 1/2] (default: 0.5)')
    model.add_argument('--J', type=float, help='Coupling J > 0 (default: 1)')
    model.add_argument('--lb', type=int, help='Block size l_b (default: 32)')
    model.add_argument('--rs', type=float, help='SST smoothing radius r_s (default: l_b/4)')
    model.add_argument('--ns', type=int, help='SST smoothing passes n_s (default: 5)')
    model.add_argument('--init', type=str, choices=['auto', 'random', 'block-mean'],
                       help='Initialization: auto = random for mpr, block means for SV variants')
    model.add_argument('--fallback-temperature', type=float,
                       help='Temperature used when the samples have no nearest-neighbour pairs')

    sim = parent.add_argument_group('Simulation Parameters')
    sim.add_argument('--nfit', type=int, help='Energies in the equilibrium fit window (default: 20)')
    sim.add_argument('--nf', type=int, help='Sweeps between equilibrium checks (default: 5)')
    sim.add_argument('--max-sweeps', type=int, help='Sweep cap before averaging starts (default: 500)')
    sim.add_argument('--mavg', type=int, help='Averaging sweeps after equilibrium (default: 100)')
    sim.add_argument('--slope-tol', type=float, help='Fixed equilibrium slope tolerance (default: from residuals)')

    cal = parent.add_argument_group('Calibration Parameters')
    cal.add_argument('--cal-size', type=int, help='Reference grid side (default: 128)')
    cal.add_argument('--cal-points', type=int, help='Calibration temperatures (default: 48)')
    cal.add_argument('--cal-tmin', type=float, help='Lowest calibration temperature (default: 1e-4)')
    cal.add_argument('--cal-tmax', type=float, help='Highest calibration temperature (default: 10)')
    cal.add_argument('--cal-sweeps', type=int, help='Sweeps per calibration temperature (default: 400)')
    cal.add_argument('--cal-seed', type=int, help='Calibration seed (default: 12345)')
    cal.add_argument('--calibration-dir', type=str,
                     help='Calibration cache directory (default: $MPR_CALIBRATION_DIR or ~/.cache/mpr_gapfill)')
    return parent


def _idw_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group('IDW Parameters')
    group.add_argument('--beta', type=float, help='IDW power (default: 2)')
    group.add_argument('--radius', type=float, help='IDW search radius in sites (default: 8)')
    group.add_argument('--idw-policy', type=str, choices=['nearest', 'error'],
                       help='Empty search disc: use the nearest sample or fail (default: nearest)')
    return parent


def _heatmap_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--scale', type=str, choices=['heat', 'gray'], default='heat', help='Color scale')
    parser.add_argument('--clip', type=float, help='Upper clip percentile of the color scale')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mpr-gapfill',
        description="Fill gaps in gridded data with the modified planar rotator model",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    logging_parent, run_parent = _logging_parent(), _run_parent()
    model_parent, idw_parent = _model_parent(), _idw_parent()

    fill = subparsers.add_parser('fill', help='Fill the gaps of a raster',
                                 parents=[logging_parent, run_parent, model_parent, idw_parent])
    fill.add_argument('input', type=str, help='Input raster')
    fill.add_argument('output', type=str, help='Output raster')
    fill.add_argument('--method', type=str, choices=[m.value for m in Method], help='Method (default: mpr)')
    fill.add_argument('--temperature-map', type=str, help='Write the temperature field as a raster')
    fill.add_argument('--heatmap', type=str, help='Write a heatmap of the filled grid')
    fill.add_argument('--trace', type=str, help='Write the per-sweep energy trace')
    fill.add_argument('--report', type=str, help='Write diagnostics and the run configuration as JSON')
    _heatmap_options(fill)

    validate = subparsers.add_parser('validate', help='Thinning experiment over several methods',
                                     parents=[logging_parent, run_parent, model_parent, idw_parent])
    validate.add_argument('input', type=str, help='Complete ground-truth raster')
    validate.add_argument('--p', type=float, help='Fraction of samples removed (default: 0.5)')
    validate.add_argument('--M', type=int, help='Number of thinning realizations (default: 100)')
    validate.add_argument('--methods', type=str,
                          help="Comma-separated methods, e.g. 'mpr,bst,sst,idw@5,bst@16'; "
                               "'sst@16:3' also sets the SST pass count (default: mpr,bst,sst)")
    validate.add_argument('--reference', type=str, help='Method used as ratio denominator (default: first mpr)')
    validate.add_argument('--report', type=str, help='Write the JSON report')
    validate.add_argument('--table', type=str, help='Write the human-readable table')

    calibrate = subparsers.add_parser('calibrate', help='Build or show the calibration curve',
                                      parents=[logging_parent, run_parent, model_parent])
    calibrate.add_argument('--rebuild', action='store_true', help='Ignore the cache and rebuild')
    calibrate.add_argument('--output', type=str, help='Also write the curve to this file')

    idw = subparsers.add_parser('idw', help='IDW baseline fill', parents=[logging_parent, run_parent, idw_parent])
    idw.add_argument('input', type=str, help='Input raster')
    idw.add_argument('output', type=str, help='Output raster')
    idw.add_argument('--report', type=str, help='Write diagnostics and the run configuration as JSON')

    synth = subparsers.add_parser('synth', help='Generate a synthetic field', parents=[logging_parent])
    synth.add_argument('output', type=str, help='Output raster')
    synth.add_argument('--size', type=int, default=256, help='Grid side')
    synth.add_argument('--layout', type=str, choices=[l.value for l in RegimeLayout], default='halves',
                       help='Regime layout')
    synth.add_argument('--means', type=str, help='Comma-separated regime means (default: two-regime field)')
    synth.add_argument('--stds', type=str, help='Comma-separated regime standard deviations')
    synth.add_argument('--corr-lens', type=str, help='Comma-separated regime correlation lengths')
    synth.add_argument('--seed', type=int, default=0, help='Seed')

    radius = subparsers.add_parser('radius', help='Minimum IDW radius covering all missing sites',
                                   parents=[logging_parent])
    radius.add_argument('input', type=str, help='Input raster')

    heatmap = subparsers.add_parser('heatmap', help='Render a raster as an image', parents=[logging_parent])
    heatmap.add_argument('input', type=str, help='Input raster')
    heatmap.add_argument('output', type=str, help='Output image (.pgm/.ppm)')
    _heatmap_options(heatmap)

    return parser


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    return build_parser().parse_args(argv)


def _write_json(path: str, payload: dict) -> None:
    ensure_parent_dir(path)
    with open(path, 'w') as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True) + '\n')


def run_fill(args, config: RunConfig) -> int:
    grid = load_raster(config.input_path)
    logger.info(f"{Fore.BLUE}Filling {config.input_path}: {grid} with {config.method.value}{Style.RESET_ALL}")
    filler = GapFiller(config, progress=not args.no_progress)
    result = filler.fill(grid)
    write_raster(result.grid, config.output_path)
    logger.info(f"{Fore.GREEN}Filled raster saved to: {config.output_path}{Style.RESET_ALL}")

    if getattr(args, 'temperature_map', None):
        if result.temperatures is None:
            logger.warning(f"{Fore.YELLOW}No temperature field for this run; skipping temperature map{Style.RESET_ALL}")
        else:
            write_raster(result.temperatures, args.temperature_map)
            logger.info(f"Temperature map saved to: {args.temperature_map}")
    if getattr(args, 'heatmap', None):
        emit_heatmap(result.grid, args.heatmap, args.scale, args.clip)
    if getattr(args, 'trace', None):
        if result.trace is None:
            logger.warning(f"{Fore.YELLOW}No energy trace for this run; skipping trace{Style.RESET_ALL}")
        else:
            write_trace(result.trace, args.trace, result.sample_energy)
    if getattr(args, 'report', None):
        _write_json(args.report, {
            'command': args.command,
            'config': config.to_dict(),
            'diagnostics': result.diagnostics,
            'calibration_seconds': filler.calibration_seconds,
            'runtime_seconds': result.runtime_seconds,
        })
    logger.info(f"Runtime: {result.runtime_seconds:.2f}s (calibration {filler.calibration_seconds:.2f}s)")
    return 0


def run_idw(args, config: RunConfig) -> int:
    return run_fill(args, replace(config, method=Method.IDW))


def run_validate(args, config: RunConfig) -> int:
    grid = load_raster(config.input_path)
    filler = GapFiller(config, progress=not args.no_progress)
    spec = ThinningSpec(config.p, config.realizations, config.seed)
    report = compare_methods(grid, spec, config.methods, filler, config.reference, progress=not args.no_progress)
    table = report.to_table()
    print(table)
    if args.report:
        report.write(args.report)
        logger.info(f"{Fore.GREEN}Report saved to: {args.report}{Style.RESET_ALL}")
    if args.table:
        ensure_parent_dir(args.table)
        with open(args.table, 'w') as f:
            f.write(table + '\n')
    return 0


def run_calibrate(args, config: RunConfig) -> int:
    curve, seconds, cached = load_or_build_curve(config.model_params(), config.t_grid(), config.cal_size,
                                                 config.cal_sweeps, config.cal_seed, config.calibration_dir,
                                                 config.threads, not args.no_progress, rebuild=args.rebuild)
    print(f"{'T':>12} {'e':>12} {'stderr':>10}")
    for temperature, energy, stderr in zip(curve.temperatures, curve.energies, curve.stderr):
        print(f"{temperature:>12.5g} {energy:>12.6f} {stderr:>10.2g}")
    logger.info(f"Calibration {'loaded' if cached else 'built'} in {seconds:.2f}s "
                f"({curve.isotonic_adjusted} points adjusted by the isotonic fit)")
    if args.output:
        ensure_parent_dir(args.output)
        save_curve(curve, args.output)
    return 0


def _float_list(text: Optional[str], count: int, name: str) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(f"--{name} must be comma-separated numbers, got {text!r}") from None
    if len(values) != count:
        raise ConfigError(f"--{name} needs {count} values, got {len(values)}")
    return values


def run_synth(args, config: RunConfig) -> int:
    layout = RegimeLayout(args.layout)
    if args.means is None and args.stds is None and args.corr_lens is None and layout is RegimeLayout.HALVES:
        spec = SyntheticFieldSpec.two_regime(args.size, args.seed)
    else:
        n = layout.n_regimes
        means = _float_list(args.means, n, 'means') or [0.0] * n
        stds = _float_list(args.stds, n, 'stds') or [1.0] * n
        corr_lens = _float_list(args.corr_lens, n, 'corr-lens') or [8] * n
        regimes = tuple(Regime(m, s, int(c)) for m, s, c in zip(means, stds, corr_lens))
        spec = SyntheticFieldSpec(args.size, layout, regimes, args.seed)
    write_raster(generate_synthetic_field(spec), args.output)
    logger.info(f"{Fore.GREEN}Synthetic field saved to: {args.output}{Style.RESET_ALL}")
    return 0


def run_radius(args, config: RunConfig) -> int:
    print(repr(min_full_coverage_radius(load_raster(args.input))))
    return 0


def run_heatmap(args, config: RunConfig) -> int:
    emit_heatmap(load_raster(args.input), args.output, args.scale, args.clip)
    logger.info(f"{Fore.GREEN}Heatmap saved to: {args.output}{Style.RESET_ALL}")
    return 0


COMMANDS = {
    'fill': run_fill,
    'validate': run_validate,
    'calibrate': run_calibrate,
    'idw': run_idw,
    'synth': run_synth,
    'radius': run_radius,
    'heatmap': run_heatmap,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code; usage errors exit with status 2."""
    load_dotenv()
    args = parse_arguments(argv)
    setup_logging(args)

    try:
        config = RunConfig.from_args(args)
        return COMMANDS[args.command](args, config)
    except GapFillError as e:
        logger.debug(f"{e.error_class}: {e}", exc_info=True)
        print(f"error: {e.error_class}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"{Fore.RED}Unexpected error: {e}{Style.RESET_ALL}", exc_info=True)
        print(f"error: INTERNAL: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
