#!/usr/bin/env python3
"""
Calibration Curve Module

This module builds, caches and inverts the equilibrium energy curve e(T):
1. build_calibration_curve - unconditional simulations on a reference grid,
   made monotone with isotonic regression
2. save_curve / load_curve - a self-describing text cache with exact float
   round-trip
3. estimate_temperature - piecewise-linear inverse lookup with clamping
"""

import os
import time
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from colorama import Fore, Style
from sklearn.isotonic import isotonic_regression
from tqdm import tqdm

from ..exceptions import CalibrationCacheError, ConfigError, GapFillError
from ..grid.grid_field import AngleField
from ..model.mpr_model import MprParams
from ..simulation.counter_rng import STREAM_CALIBRATION, derive_seed
from ..simulation.simulation_engine import (EnergyTrace, SimulationConfig, first_equilibrium,
                                            run_unconditional_simulation)
from ..utils.file_utils import ensure_output_dir

# Get logger
logger = logging.getLogger('mpr_gapfill')

DEFAULT_T_MIN = 1e-4
DEFAULT_T_MAX = 10.0
DEFAULT_POINTS = 48
DEFAULT_REF_SIZE = 128
DEFAULT_SWEEPS = 400
DEFAULT_CALIBRATION_SEED = 12345
N_BATCHES = 10

CACHE_DIR_ENV = 'MPR_CALIBRATION_DIR'
DEFAULT_CACHE_DIR = '~/.cache/mpr_gapfill'
CACHE_VERSION = 2
CACHE_MAGIC = '# mpr_gapfill calibration curve'
COLUMNS = 'temperature energy stderr raw_energy'


def default_t_grid(points: int = DEFAULT_POINTS, t_min: float = DEFAULT_T_MIN,
                   t_max: float = DEFAULT_T_MAX) -> np.ndarray:
    """Log-spaced temperatures in [t_min, t_max]."""
    if points < 2 or not 0 < t_min < t_max:
        raise ConfigError(f"Need points >= 2 and 0 < t_min < t_max, got {points}, {t_min}, {t_max}")
    return np.geomspace(t_min, t_max, points)


def check_t_grid(t_grid: Sequence[float]) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ConfigError("Temperature grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(t_grid)) or t_grid[0] < 0:
        raise ConfigError("Temperatures must be finite and non-negative")
    if np.any(np.diff(t_grid) <= 0):
        raise ConfigError("Temperature grid must be strictly increasing")
    return t_grid


@dataclass(frozen=True, eq=False)
class CalibrationCurve:
    """Equilibrium specific energy e(T) on a reference grid.

    ``energies`` is the isotonic fit of ``raw_energies``; ``stderr`` holds the
    batch-means standard error of each raw value.
    """

    temperatures: np.ndarray
    energies: np.ndarray
    stderr: np.ndarray
    raw_energies: np.ndarray
    q: float = 0.5
    coupling: float = 1.0
    ref_size: int = DEFAULT_REF_SIZE
    sweeps: int = DEFAULT_SWEEPS
    seed: int = DEFAULT_CALIBRATION_SEED
    isotonic_adjusted: int = 0

    def __post_init__(self):
        arrays = {}
        for name in ('temperatures', 'energies', 'stderr', 'raw_energies'):
            value = np.array(getattr(self, name), dtype=np.float64)
            value.setflags(write=False)
            arrays[name] = value
            object.__setattr__(self, name, value)
        check_t_grid(arrays['temperatures'])
        n = arrays['temperatures'].size
        if any(a.shape != (n,) for a in arrays.values()):
            raise ConfigError("Calibration columns must all have one entry per temperature")
        if np.any(np.diff(arrays['energies']) < 0):
            raise ConfigError("Calibration energies must be non-decreasing in T")

    @property
    def t_min(self) -> float:
        return float(self.temperatures[0])

    @property
    def t_max(self) -> float:
        return float(self.temperatures[-1])

    def energy_at(self, temperature: float) -> float:
        """Forward lookup e(T), clamped to the curve ends."""
        return float(np.interp(temperature, self.temperatures, self.energies))

    def metadata(self) -> dict:
        return {
            'q': self.q,
            'coupling': self.coupling,
            'size': self.ref_size,
            'sweeps': self.sweeps,
            'seed': self.seed,
            'isotonic_adjusted': self.isotonic_adjusted,
        }

    def __eq__(self, other):
        if not isinstance(other, CalibrationCurve):
            return NotImplemented
        return (self.metadata() == other.metadata()
                and all(np.array_equal(getattr(self, n), getattr(other, n))
                        for n in ('temperatures', 'energies', 'stderr', 'raw_energies')))

    def __len__(self):
        return int(self.temperatures.size)


@dataclass(frozen=True)
class TemperatureEstimate:
    temperature: float
    clamped: bool


def estimate_temperature(e_s: float, curve: CalibrationCurve) -> TemperatureEstimate:
    """Invert the curve at ``e_s``; values outside the recorded range clamp to T_min / T_max."""
    energies, temperatures = curve.energies, curve.temperatures
    if not np.isfinite(e_s):
        raise ConfigError(f"Sample energy must be finite, got {e_s}")
    if e_s <= energies[0]:
        return TemperatureEstimate(float(temperatures[0]), True)
    if e_s >= energies[-1]:
        return TemperatureEstimate(float(temperatures[-1]), True)
    # Plateaus left by the isotonic fit keep their lowest temperature
    keep = np.concatenate(([True], np.diff(energies) > 0))
    return TemperatureEstimate(float(np.interp(e_s, energies[keep], temperatures[keep])), False)


def _batch_stderr(values: np.ndarray, n_batches: int = N_BATCHES) -> float:
    means = np.array([batch.mean() for batch in np.array_split(values, n_batches)])
    return float(np.std(means, ddof=1) / np.sqrt(n_batches))


def _burn_in(trace: EnergyTrace, config: SimulationConfig, limit: int) -> int:
    """First slope-test equilibrium, or ``limit``; a rising trace is tested negated."""
    energies = np.asarray(trace.energies)
    if energies[0] < float(np.mean(energies[energies.size // 2:])):
        trace = EnergyTrace([-e for e in trace.energies], list(trace.acceptance))
    return first_equilibrium(trace, config, limit=limit) or limit


def build_calibration_curve(params: MprParams, t_grid: Sequence[float], ref_size: int = DEFAULT_REF_SIZE,
                            sweeps: int = DEFAULT_SWEEPS, seed: int = DEFAULT_CALIBRATION_SEED,
                            threads: int = 1, progress: bool = True) -> CalibrationCurve:
    """
    Build e(T) from unconditional simulations on a ref_size x ref_size grid.

    Temperatures are visited in increasing order. The lowest starts from the
    ordered state and each later one from the final state of the previous
    run. Burn-in is detected by the slope test (at most half the sweeps) and
    the energy is averaged over the remaining sweeps.

    Args:
        params: Model parameters (q and J are used)
        t_grid: Strictly increasing temperatures
        ref_size: Side of the reference grid
        sweeps: Sweeps per temperature, burn-in included
        seed: Master seed of the calibration runs
        threads: Worker threads per sweep
        progress: Show a progress bar

    Returns:
        The monotone calibration curve
    """
    t_grid = check_t_grid(t_grid)
    eq_config = SimulationConfig()
    if ref_size < 2:
        raise ConfigError(f"Reference grid size must be at least 2, got {ref_size}")
    if sweeps < 2 * (eq_config.n_fit + eq_config.n_f):
        raise ConfigError(f"Calibration needs at least {2 * (eq_config.n_fit + eq_config.n_f)} sweeps, got {sweeps}")

    raw = np.empty(t_grid.size)
    stderr = np.empty(t_grid.size)
    logger.info(f"Building calibration curve: q={params.q}, {ref_size}x{ref_size} grid, "
                f"{t_grid.size} temperatures, {sweeps} sweeps each")

    with tqdm(
        total=t_grid.size,
        desc=f"{Fore.GREEN}Calibrating e(T){Style.RESET_ALL}",
        unit="T",
        bar_format='{desc}: |{bar:30}| {percentage:3.0f}% | {n_fmt}/{total_fmt} temperatures',
        colour='green',
        disable=not progress
    ) as pbar:
        shape = (ref_size, ref_size)
        angles = AngleField(np.zeros(shape), np.zeros(shape, dtype=bool))
        for k, temperature in enumerate(t_grid):
            trace = run_unconditional_simulation(shape, float(temperature), params, sweeps,
                                                 derive_seed(seed, STREAM_CALIBRATION, k), threads, angles)
            burn_in = _burn_in(trace, eq_config, sweeps // 2)
            measured = trace.window(burn_in)
            raw[k] = float(np.mean(measured))
            stderr[k] = _batch_stderr(measured)
            logger.debug(f"T={temperature:.6g}: e={raw[k]:.6f} +/- {stderr[k]:.2g} (burn-in {burn_in})")
            pbar.update(1)

    fitted = isotonic_regression(raw, increasing=True)
    adjusted = int(np.count_nonzero(fitted != raw))

    drops = np.diff(raw)
    tolerance = 3.0 * np.sqrt(stderr[:-1] ** 2 + stderr[1:] ** 2)
    significant = np.nonzero(drops < -tolerance)[0]
    for k in significant:
        logger.warning(f"{Fore.YELLOW}Raw calibration energy drops from {raw[k]:.6f} at T={t_grid[k]:.4g} "
                       f"to {raw[k + 1]:.6f} at T={t_grid[k + 1]:.4g} (beyond 3 sigma){Style.RESET_ALL}")
    if adjusted:
        logger.info(f"Isotonic fit adjusted {adjusted} of {t_grid.size} calibration points")

    return CalibrationCurve(t_grid, fitted, stderr, raw, q=params.q, coupling=params.coupling,
                            ref_size=ref_size, sweeps=sweeps, seed=seed, isotonic_adjusted=adjusted)


def calibration_dir(directory: Optional[str] = None) -> Path:
    """Cache directory: explicit argument, then $MPR_CALIBRATION_DIR, then ~/.cache/mpr_gapfill."""
    return Path(directory or os.environ.get(CACHE_DIR_ENV) or DEFAULT_CACHE_DIR).expanduser()


def cache_path(directory: Path, params: MprParams, t_grid: Sequence[float], ref_size: int,
               sweeps: int, seed: int) -> Path:
    digest = hashlib.sha1(np.asarray(t_grid, dtype=np.float64).tobytes()).hexdigest()[:12]
    name = (f"calibration_v{CACHE_VERSION}_q{params.q!r}_J{params.coupling!r}_L{ref_size}_s{sweeps}"
            f"_seed{seed}_{digest}.txt")
    return Path(directory) / name


def save_curve(curve: CalibrationCurve, path) -> None:
    lines = [CACHE_MAGIC]
    lines += [f"{key} {value!r}" for key, value in curve.metadata().items()]
    lines.append(COLUMNS)
    for row in zip(curve.temperatures, curve.energies, curve.stderr, curve.raw_energies):
        lines.append(' '.join(repr(float(v)) for v in row))
    Path(path).write_text('\n'.join(lines) + '\n')


_HEADER_TYPES = {'q': float, 'coupling': float, 'size': int, 'sweeps': int, 'seed': int, 'isotonic_adjusted': int}


def load_curve(path) -> CalibrationCurve:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise CalibrationCacheError(f"Cannot read calibration cache {path}: {e}") from e

    if not lines or lines[0] != CACHE_MAGIC:
        raise CalibrationCacheError(f"{path}:1: not a calibration cache file")
    header = {}
    line_no = 1
    for line_no, line in enumerate(lines[1:], start=2):
        if line == COLUMNS:
            break
        key, _, value = line.partition(' ')
        if key not in _HEADER_TYPES:
            raise CalibrationCacheError(f"{path}:{line_no}: unknown header key {key!r}")
        try:
            header[key] = _HEADER_TYPES[key](value)
        except ValueError as e:
            raise CalibrationCacheError(f"{path}:{line_no}: bad value for {key}: {value!r}") from e
    else:
        raise CalibrationCacheError(f"{path}: missing column line '{COLUMNS}'")
    missing = set(_HEADER_TYPES) - set(header)
    if missing:
        raise CalibrationCacheError(f"{path}: missing header keys {sorted(missing)}")

    rows = []
    for row_no, line in enumerate(lines[line_no:], start=line_no + 1):
        try:
            row = [float(v) for v in line.split()]
        except ValueError as e:
            raise CalibrationCacheError(f"{path}:{row_no}: non-numeric row") from e
        if len(row) != 4:
            raise CalibrationCacheError(f"{path}:{row_no}: expected 4 columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise CalibrationCacheError(f"{path}: no calibration rows")

    columns = np.array(rows).T
    try:
        return CalibrationCurve(columns[0], columns[1], columns[2], columns[3], q=header['q'],
                                coupling=header['coupling'], ref_size=header['size'], sweeps=header['sweeps'],
                                seed=header['seed'], isotonic_adjusted=header['isotonic_adjusted'])
    except ConfigError as e:
        raise CalibrationCacheError(f"{path}: invalid calibration data: {e}") from e


def load_or_build_curve(params: MprParams, t_grid: Optional[Sequence[float]] = None,
                        ref_size: int = DEFAULT_REF_SIZE, sweeps: int = DEFAULT_SWEEPS,
                        seed: int = DEFAULT_CALIBRATION_SEED, directory: Optional[str] = None,
                        threads: int = 1, progress: bool = True,
                        rebuild: bool = False) -> Tuple[CalibrationCurve, float, bool]:
    """
    Return a cached curve, building and caching it on a miss.

    Returns:
        (curve, seconds spent, True if it came from the cache)
    """
    start_time = time.time()
    t_grid = check_t_grid(default_t_grid() if t_grid is None else t_grid)
    directory = calibration_dir(directory)
    path = cache_path(directory, params, t_grid, ref_size, sweeps, seed)

    if path.exists() and not rebuild:
        try:
            curve = load_curve(path)
            logger.info(f"Using cached calibration curve: {path}")
            return curve, time.time() - start_time, True
        except CalibrationCacheError as e:
            logger.warning(f"{Fore.YELLOW}Ignoring unreadable calibration cache: {e}{Style.RESET_ALL}")

    curve = build_calibration_curve(params, t_grid, ref_size, sweeps, seed, threads, progress)
    try:
        ensure_output_dir(str(directory))
        save_curve(curve, path)
        logger.info(f"Calibration curve cached at {path}")
    except (OSError, GapFillError) as e:
        logger.warning(f"{Fore.YELLOW}Could not cache calibration curve: {e}{Style.RESET_ALL}")
    return curve, time.time() - start_time, False
