#!/usr/bin/env python3
"""
Gap-filling pipeline.

GapFiller ties the modules together for one grid: value transform, sample
energy, temperature inference (uniform, BST or SST), conditional simulation,
or the IDW baseline.
"""

import time
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

from colorama import Fore, Style

from .baseline.idw_interpolator import idw_predict
from .calibration.calibration_curve import (CalibrationCurve, TemperatureEstimate, estimate_temperature,
                                            load_or_build_curve)
from .config import Method, RunConfig
from .exceptions import NoSampleBondsError
from .grid.grid_field import BlockDecomposition, GridField, TransformParams, make_blocks, to_angles
from .grid.temperature_field import TemperatureField
from .model.mpr_model import sample_specific_energy
from .simulation.simulation_engine import EnergyTrace, run_conditional_simulation
from .temperature.sv_temperature import (BlockTemperatureStats, assign_block_temperatures, block_sample_energies,
                                         expand_to_sites, smooth_temperatures)

# Get logger
logger = logging.getLogger('mpr_gapfill')


@dataclass
class FillResult:
    grid: GridField
    method: Method
    runtime_seconds: float
    trace: Optional[EnergyTrace] = None
    temperatures: Optional[TemperatureField] = None
    block_stats: Optional[BlockTemperatureStats] = None
    sample_energy: Optional[float] = None
    global_temperature: Optional[TemperatureEstimate] = None
    diagnostics: dict = field(default_factory=dict)


def resolve_calibration(config: RunConfig, progress: bool = True) -> Tuple[CalibrationCurve, float]:
    """Load or build the calibration curve described by ``config``; returns (curve, seconds)."""
    curve, seconds, _ = load_or_build_curve(config.model_params(), config.t_grid(), config.cal_size,
                                            config.cal_sweeps, config.cal_seed, config.calibration_dir,
                                            config.threads, progress)
    return curve, seconds


class GapFiller:
    """Fill MISSING sites with MPR, SV-MPR (BST/SST) or IDW."""

    def __init__(self, config: RunConfig, curve: Optional[CalibrationCurve] = None, progress: bool = True):
        """
        Initialize the gap filler.

        Args:
            config: Run configuration
            curve: Calibration curve to use (loaded or built on first need if None)
            progress: Show progress bars while calibrating
        """
        self.config = config
        self._curve = curve
        self.progress = progress
        self.calibration_seconds = 0.0

    @property
    def curve(self) -> CalibrationCurve:
        if self._curve is None:
            self._curve, self.calibration_seconds = resolve_calibration(self.config, self.progress)
        return self._curve

    def fill(self, grid: GridField, method: Optional[Method] = None, seed: Optional[int] = None,
             block_size: Optional[int] = None, radius: Optional[float] = None,
             smoothing_passes: Optional[int] = None) -> FillResult:
        """
        Fill one grid.

        Args:
            grid: Input grid
            method: Method to use (config.method if None)
            seed: Simulation seed (config.seed if None)
            block_size: Block size override for the SV variants
            radius: Search radius override for IDW
            smoothing_passes: SST pass count override

        Returns:
            FillResult with the filled grid and its diagnostics
        """
        method = method or self.config.method
        start_time = time.time()
        grid.require_samples(2)

        if method is Method.IDW:
            result = idw_predict(grid, self.config.idw_params(radius), self.config.threads)
            return FillResult(result.grid, method, time.time() - start_time,
                              diagnostics={'method': method.value, **result.diagnostics()})

        block_size = block_size or self.config.block_size
        decomposition = make_blocks(grid.shape, block_size)
        params = self.config.model_params()
        sim_config = self.config.sim_config(seed, method)
        transform = TransformParams.from_grid(grid)

        if grid.is_complete() or transform.is_degenerate:
            # Nothing to infer; the simulation short-circuits
            temperatures = TemperatureField.uniform(grid.shape, 0.0)
            sim = run_conditional_simulation(grid, temperatures, params, sim_config, decomposition)
            return FillResult(sim.grid, method, time.time() - start_time, trace=sim.trace,
                              diagnostics={'method': method.value, **sim.diagnostics.to_dict()})

        angles = to_angles(grid, transform)
        sample_stats = sample_specific_energy(angles, params)
        global_estimate = self._global_temperature(sample_stats.energy)

        block_stats = None
        if method is Method.MPR:
            if global_estimate is None:
                raise NoSampleBondsError("No sample-sample bonds to infer a temperature from; "
                                         "set a fallback temperature to proceed")
            temperatures = TemperatureField.uniform(grid.shape, global_estimate.temperature)
            clamped = int(global_estimate.clamped)
        else:
            temperatures, block_stats = self.block_temperatures(angles, decomposition, global_estimate)
            if method is Method.SVMPR_SST:
                radius_s = self.config.smoothing_radius or max(1.0, block_size / 4.0)
                passes = self.config.smoothing_passes if smoothing_passes is None else smoothing_passes
                temperatures = smooth_temperatures(temperatures, radius_s, passes)
            clamped = int(block_stats.clamped.sum())

        summary = temperatures.summary()
        logger.info(f"{Fore.CYAN}{method.value}{Style.RESET_ALL}: temperature {summary['provenance']} "
                    f"mean={summary['mean']:.4g} min={summary['min']:.4g} max={summary['max']:.4g}")

        sim = run_conditional_simulation(grid, temperatures, params, sim_config, decomposition)
        sim.diagnostics.clamped_temperatures = clamped

        diagnostics = {
            'method': method.value,
            'sample_energy': sample_stats.energy,
            'sample_bonds': sample_stats.n_bonds,
            'global_temperature': global_estimate.temperature if global_estimate else None,
            'global_temperature_clamped': global_estimate.clamped if global_estimate else None,
            'temperature_field': summary,
            **sim.diagnostics.to_dict(),
        }
        if block_stats is not None:
            diagnostics['blocks'] = block_stats.summary()

        return FillResult(sim.grid, method, time.time() - start_time, trace=sim.trace,
                          temperatures=temperatures, block_stats=block_stats,
                          sample_energy=sample_stats.energy, global_temperature=global_estimate,
                          diagnostics=diagnostics)

    def _global_temperature(self, sample_energy: Optional[float]) -> Optional[TemperatureEstimate]:
        if sample_energy is not None:
            estimate = estimate_temperature(sample_energy, self.curve)
            if estimate.clamped:
                logger.warning(f"{Fore.YELLOW}Sample energy {sample_energy:.6f} is outside the calibrated range; "
                               f"temperature clamped to {estimate.temperature:.6g}{Style.RESET_ALL}")
            return estimate
        if self.config.fallback_temperature is not None:
            logger.warning(f"{Fore.YELLOW}No sample-sample bonds; using fallback temperature "
                           f"{self.config.fallback_temperature}{Style.RESET_ALL}")
            return TemperatureEstimate(float(self.config.fallback_temperature), False)
        return None

    def block_temperatures(self, angles, decomposition: BlockDecomposition,
                           global_estimate: Optional[TemperatureEstimate]
                           ) -> Tuple[TemperatureField, BlockTemperatureStats]:
        """BST step field for the given blocks."""
        stats = block_sample_energies(angles, decomposition, self.config.model_params())
        stats = assign_block_temperatures(stats, self.curve,
                                          global_estimate.temperature if global_estimate else None)
        return expand_to_sites(stats), stats
