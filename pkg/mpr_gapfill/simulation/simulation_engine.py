#!/usr/bin/env python3
"""
Simulation Engine Module

This module runs conditional Monte Carlo simulations of the MPR model:
1. initialize_angles - RANDOM or BLOCK_MEAN start for the FREE sites
2. CheckerboardSampler / metropolis_sweep - one color phase at a time, optionally
   split into row bands on a thread pool
3. detect_equilibrium - slope test on the last n_fit grid energies
4. run_conditional_simulation - equilibrate, then average the back-transformed
   values of the FREE sites over M_avg sweeps
"""

import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from colorama import Fore, Style

from ..exceptions import ConfigError, NoSamplesError
from ..grid.grid_field import (TWO_PI, AngleField, BlockDecomposition, Color, GridField, Shape,
                               TransformParams, angles_to_values, color_mask, make_blocks, row_bands,
                               to_angles)
from ..grid.temperature_field import TemperatureField
from ..model.mpr_model import MprParams, grid_specific_energy
from ..utils.file_utils import memory_usage_mb
from .counter_rng import STREAM_INIT, STREAM_SWEEP, counter_generator

# Get logger
logger = logging.getLogger('mpr_gapfill')

# Per-sweep slope floor as a fraction of the energy drop since the first sweep
RELATIVE_SLOPE_TOLERANCE = 2e-4


class InitStrategy(Enum):
    RANDOM = 'random'
    BLOCK_MEAN = 'block-mean'


@dataclass(frozen=True)
class SimulationConfig:
    """Sweep schedule of a conditional simulation.

    ``slope_tolerance`` of None means the tolerance is derived at every check:
    the larger of 2*std(residuals)/n_fit and ``relative_slope_tolerance`` times
    the energy drop since the first sweep.
    """

    n_fit: int = 20
    n_f: int = 5
    max_sweeps: int = 500
    m_avg: int = 100
    seed: int = 0
    init_strategy: InitStrategy = InitStrategy.RANDOM
    slope_tolerance: Optional[float] = None
    relative_slope_tolerance: float = RELATIVE_SLOPE_TOLERANCE
    threads: int = 1

    def __post_init__(self):
        if self.n_fit < 2:
            raise ConfigError(f"n_fit must be at least 2, got {self.n_fit}")
        if self.n_f < 1:
            raise ConfigError(f"n_f must be at least 1, got {self.n_f}")
        if self.m_avg < 1:
            raise ConfigError(f"M_avg must be at least 1, got {self.m_avg}")
        if self.max_sweeps < self.n_fit + self.n_f:
            raise ConfigError(f"max_sweeps ({self.max_sweeps}) must be at least n_fit + n_f "
                              f"({self.n_fit + self.n_f})")
        if self.slope_tolerance is not None and not self.slope_tolerance >= 0:
            raise ConfigError(f"slope_tolerance must be non-negative, got {self.slope_tolerance}")
        if not self.relative_slope_tolerance >= 0:
            raise ConfigError(f"relative_slope_tolerance must be non-negative, got {self.relative_slope_tolerance}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")


@dataclass
class EnergyTrace:
    """Grid specific energy and acceptance ratio after every completed sweep."""

    energies: List[float] = field(default_factory=list)
    acceptance: List[float] = field(default_factory=list)

    def append(self, energy: float, acceptance_ratio: float) -> None:
        self.energies.append(float(energy))
        self.acceptance.append(float(acceptance_ratio))

    def __len__(self):
        return len(self.energies)

    @property
    def last_energy(self) -> Optional[float]:
        return self.energies[-1] if self.energies else None

    def window(self, start: int, stop: Optional[int] = None) -> np.ndarray:
        return np.asarray(self.energies[start:stop], dtype=np.float64)


class PredictionAccumulator:
    """Running per-site sum of back-transformed FREE values."""

    def __init__(self, free: np.ndarray):
        self._free = np.array(free, dtype=bool)
        self._sums = np.zeros(int(np.count_nonzero(self._free)), dtype=np.float64)
        self.count = 0

    def add(self, values: np.ndarray) -> None:
        self._sums += values[self._free]
        self.count += 1

    def mean(self) -> np.ndarray:
        if self.count == 0:
            raise ConfigError("No sweeps were accumulated")
        return self._sums / self.count


@dataclass
class SimulationDiagnostics:
    sweeps_to_equilibrium: int = 0
    total_sweeps: int = 0
    equilibrated: bool = True
    final_energy: Optional[float] = None
    mean_equilibrium_energy: Optional[float] = None
    mean_acceptance: Optional[float] = None
    degenerate_range: bool = False
    clamped_temperatures: int = 0
    n_free: int = 0
    runtime_seconds: float = 0.0
    memory_mb: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimulationResult:
    grid: GridField
    trace: EnergyTrace
    diagnostics: SimulationDiagnostics


def initialize_angles(angles: AngleField, decomposition: Optional[BlockDecomposition] = None,
                      strategy: InitStrategy = InitStrategy.RANDOM, seed: int = 0) -> AngleField:
    """Set the FREE angles in place and return the field.

    BLOCK_MEAN uses the arithmetic mean of the FIXED angles of each block,
    and the global FIXED mean for blocks without samples.
    """
    fixed = angles.fixed
    if not fixed.any():
        raise NoSamplesError("Cannot initialize a conditional simulation without FIXED sites")
    free = ~fixed
    if not free.any():
        return angles

    if strategy is InitStrategy.RANDOM:
        draws = counter_generator(seed, STREAM_INIT).random(angles.shape) * TWO_PI
        angles.angles[free] = draws[free]
        return angles

    if decomposition is None:
        decomposition = make_blocks(angles.shape, max(2, *angles.shape))
    if decomposition.shape != angles.shape:
        raise ConfigError(f"Block decomposition shape {decomposition.shape} does not match grid {angles.shape}")
    index = decomposition.block_index[fixed]
    sums = np.bincount(index, weights=angles.angles[fixed], minlength=decomposition.n_blocks)
    counts = np.bincount(index, minlength=decomposition.n_blocks)
    global_mean = float(np.mean(angles.angles[fixed]))
    per_block = np.full(decomposition.n_blocks, global_mean)
    has_samples = counts > 0
    per_block[has_samples] = sums[has_samples] / counts[has_samples]
    angles.angles[free] = per_block[decomposition.block_index][free]
    return angles


def _band_local_energy(theta: np.ndarray, angles: np.ndarray, r0: int, r1: int,
                       coupling: float, q: float) -> np.ndarray:
    """Energy of every bond touching rows r0:r1 if those rows held ``theta``.

    The four neighbour terms are added left, right, up, down for every site,
    so the result does not depend on where the band edges fall.
    """
    height = angles.shape[0]
    cos_sum = np.zeros_like(theta)
    cos_sum[:, 1:] += np.cos(q * (theta[:, 1:] - angles[r0:r1, :-1]))
    cos_sum[:, :-1] += np.cos(q * (theta[:, :-1] - angles[r0:r1, 1:]))
    if r0 > 0:
        cos_sum[0] += np.cos(q * (theta[0] - angles[r0 - 1]))
    cos_sum[1:] += np.cos(q * (theta[1:] - angles[r0:r1 - 1]))
    cos_sum[:-1] += np.cos(q * (theta[:-1] - angles[r0 + 1:r1]))
    if r1 < height:
        cos_sum[-1] += np.cos(q * (theta[-1] - angles[r1]))
    return -coupling * cos_sum


class CheckerboardSampler:
    """Metropolis sampler updating one checkerboard color at a time.

    Workers only read the angle array and return accept masks; the phase is
    committed after every band has finished.
    """

    def __init__(self, angles: AngleField, temps: TemperatureField, params: MprParams,
                 seed: int, threads: int = 1):
        if temps.shape != angles.shape:
            raise ConfigError(f"Temperature field shape {temps.shape} does not match grid {angles.shape}")
        self.angles = angles
        self.temperatures = temps.values
        self.params = params
        self.seed = seed
        self.n_free = angles.n_free
        self._updatable = {color: color_mask(angles.shape, color) & angles.free for color in Color}
        self._bands = row_bands(angles.height, threads)
        self._executor = ThreadPoolExecutor(max_workers=len(self._bands)) if len(self._bands) > 1 else None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def _accept_band(self, color: Color, proposals: np.ndarray, uniforms: np.ndarray,
                     band: Tuple[int, int]) -> np.ndarray:
        r0, r1 = band
        current = self.angles.angles
        coupling, q = self.params.coupling, self.params.q
        delta = (_band_local_energy(proposals[r0:r1], current, r0, r1, coupling, q)
                 - _band_local_energy(current[r0:r1], current, r0, r1, coupling, q))
        temps = self.temperatures[r0:r1]
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            # T = 0 gives exp(-inf) = 0 for uphill moves, a zero-temperature quench
            probability = np.exp(-delta / temps)
        accept = (delta <= 0) | (uniforms[r0:r1] < probability)
        return accept & self._updatable[color][r0:r1]

    def _accept_mask(self, color: Color, proposals: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        if self._executor is None:
            return self._accept_band(color, proposals, uniforms, self._bands[0])
        parts = list(self._executor.map(lambda band: self._accept_band(color, proposals, uniforms, band),
                                        self._bands))
        return np.concatenate(parts, axis=0)

    def sweep(self, sweep_index: int) -> float:
        """Run one sweep (color A, then color B) and return the acceptance ratio."""
        if self.n_free == 0:
            return 1.0
        accepted = 0
        for color in Color:
            rng = counter_generator(self.seed, STREAM_SWEEP, sweep_index, color.value)
            proposals = rng.random(self.angles.shape) * TWO_PI
            uniforms = rng.random(self.angles.shape)
            accept = self._accept_mask(color, proposals, uniforms)
            np.copyto(self.angles.angles, proposals, where=accept)
            accepted += int(np.count_nonzero(accept))
        return accepted / self.n_free


def metropolis_sweep(angles: AngleField, temps: TemperatureField, params: MprParams,
                     sweep_index: int, seed: int, threads: int = 1) -> Tuple[AngleField, float]:
    """One full checkerboard sweep; ``angles`` is updated in place."""
    with CheckerboardSampler(angles, temps, params, seed, threads) as sampler:
        ratio = sampler.sweep(sweep_index)
    return angles, ratio


def slope_test(energies: Sequence[float], slope_tolerance: Optional[float] = None,
               energy_scale: float = 0.0, relative_tolerance: float = RELATIVE_SLOPE_TOLERANCE) -> bool:
    """
    Least-squares slope of ``energies``: True if non-negative or within tolerance.

    Without an explicit ``slope_tolerance`` the tolerance is the larger of
    2*std(residuals)/n and ``relative_tolerance * energy_scale``.
    """
    y = np.asarray(energies, dtype=np.float64)
    n = y.size
    x = np.arange(n, dtype=np.float64) - (n - 1) / 2.0
    y_mean = float(np.mean(y))
    slope = float(np.dot(x, y - y_mean) / np.dot(x, x))
    if slope_tolerance is None:
        residuals = y - (y_mean + slope * x)
        slope_tolerance = max(2.0 * float(np.std(residuals)) / n, relative_tolerance * abs(energy_scale), 1e-12)
    return slope >= 0 or abs(slope) <= slope_tolerance


def _window_test(trace: EnergyTrace, stop: int, config: SimulationConfig) -> bool:
    window = trace.window(stop - config.n_fit, stop)
    energy_drop = trace.energies[0] - float(np.mean(window))
    return slope_test(window, config.slope_tolerance, energy_drop, config.relative_slope_tolerance)


def detect_equilibrium(trace: EnergyTrace, config: SimulationConfig) -> bool:
    """Check the last n_fit energies; only at lengths n_fit + k*n_f with k >= 1."""
    n = len(trace)
    if n < config.n_fit + config.n_f or (n - config.n_fit) % config.n_f != 0:
        return False
    return _window_test(trace, n, config)


def first_equilibrium(trace: EnergyTrace, config: SimulationConfig, limit: Optional[int] = None) -> Optional[int]:
    """Smallest trace length at which detect_equilibrium fires, or None."""
    limit = len(trace) if limit is None else min(limit, len(trace))
    for n in range(config.n_fit + config.n_f, limit + 1, config.n_f):
        if _window_test(trace, n, config):
            return n
    return None


def run_unconditional_simulation(shape: Shape, temperature: float, params: MprParams, sweeps: int,
                                 seed: int, threads: int = 1, angles: Optional[AngleField] = None) -> EnergyTrace:
    """
    Simulate an all-FREE grid at a fixed temperature.

    The run starts from random angles, or from ``angles`` when given; that
    field is updated in place and holds the final state afterwards.
    """
    if angles is None:
        angles = AngleField(counter_generator(seed, STREAM_INIT).random(shape) * TWO_PI,
                            np.zeros(shape, dtype=bool))
    elif angles.shape != tuple(shape):
        raise ConfigError(f"Start state shape {angles.shape} does not match {tuple(shape)}")
    temps = TemperatureField.uniform(shape, temperature)
    trace = EnergyTrace()
    with CheckerboardSampler(angles, temps, params, seed, threads) as sampler:
        for sweep_index in range(sweeps):
            ratio = sampler.sweep(sweep_index)
            trace.append(grid_specific_energy(angles, params), ratio)
    return trace


def run_conditional_simulation(grid: GridField, temps: TemperatureField, params: MprParams,
                               config: SimulationConfig,
                               decomposition: Optional[BlockDecomposition] = None) -> SimulationResult:
    """
    Fill the MISSING sites of a grid with conditional means of the MPR model.

    Args:
        grid: Input grid; SAMPLE values are copied to the output unchanged
        temps: Per-site temperatures
        params: Model parameters (the temperature in ``params`` is not used)
        config: Sweep schedule, seed and worker count
        decomposition: Blocks for BLOCK_MEAN initialization (whole grid if None)

    Returns:
        SimulationResult with the filled grid, energy trace and diagnostics
    """
    start_time = time.time()
    grid.require_samples(2)
    if temps.shape != grid.shape:
        raise ConfigError(f"Temperature field shape {temps.shape} does not match grid {grid.shape}")

    diagnostics = SimulationDiagnostics(n_free=grid.n_missing)
    trace = EnergyTrace()

    if grid.is_complete():
        logger.info("Grid has no MISSING sites; nothing to predict")
        diagnostics.runtime_seconds = time.time() - start_time
        return SimulationResult(grid, trace, diagnostics)

    transform = TransformParams.from_grid(grid)
    if transform.is_degenerate:
        logger.warning(f"{Fore.YELLOW}All samples equal {transform.z_min!r}; "
                       f"filling {grid.n_missing} sites with that constant{Style.RESET_ALL}")
        diagnostics.degenerate_range = True
        filled = grid.with_values(~grid.mask, np.full(grid.n_missing, transform.z_min))
        diagnostics.runtime_seconds = time.time() - start_time
        return SimulationResult(filled, trace, diagnostics)

    angles = initialize_angles(to_angles(grid, transform), decomposition, config.init_strategy, config.seed)

    with CheckerboardSampler(angles, temps, params, config.seed, config.threads) as sampler:
        sweep_index = 0
        equilibrated = False
        while sweep_index < config.max_sweeps:
            ratio = sampler.sweep(sweep_index)
            sweep_index += 1
            energy = grid_specific_energy(angles, params)
            trace.append(energy, ratio)
            logger.debug(f"sweep {sweep_index}: e={energy:.6f} acceptance={ratio:.4f}")
            if detect_equilibrium(trace, config):
                equilibrated = True
                break

        diagnostics.sweeps_to_equilibrium = sweep_index
        diagnostics.equilibrated = equilibrated
        if equilibrated:
            logger.debug(f"Equilibrium detected after {sweep_index} sweeps")
        else:
            logger.warning(f"{Fore.YELLOW}No equilibrium detected within {config.max_sweeps} sweeps; "
                           f"averaging anyway{Style.RESET_ALL}")

        accumulator = PredictionAccumulator(angles.free)
        for _ in range(config.m_avg):
            ratio = sampler.sweep(sweep_index)
            sweep_index += 1
            energy = grid_specific_energy(angles, params)
            trace.append(energy, ratio)
            logger.debug(f"sweep {sweep_index}: e={energy:.6f} acceptance={ratio:.4f}")
            accumulator.add(angles_to_values(angles.angles, transform))

    predictions = np.clip(accumulator.mean(), transform.z_min, transform.z_max)
    filled = grid.with_values(angles.free, predictions)

    diagnostics.total_sweeps = sweep_index
    diagnostics.final_energy = trace.last_energy
    diagnostics.mean_equilibrium_energy = float(np.mean(trace.window(-config.m_avg)))
    diagnostics.mean_acceptance = float(np.mean(trace.acceptance))
    diagnostics.runtime_seconds = time.time() - start_time
    diagnostics.memory_mb = memory_usage_mb()
    return SimulationResult(filled, trace, diagnostics)
