#!/usr/bin/env python3
"""
Validation Harness Module

This module runs thinning experiments:
1. make_thinnings - remove a random fraction p of the samples, M times
2. score - AAE and RASE over the held-out sites
3. compare_methods - run every method on every realization and aggregate
   MAAE, MRASE, runtimes, error ratios and paired win rates
"""

import json
import math
import time
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Union

import numpy as np
from colorama import Fore, Style
from tqdm import tqdm

from ..config import Method
from ..exceptions import ConfigError, GapFillError, NoSamplesError, ScoringError
from ..grid.grid_field import GridField
from ..pipeline import GapFiller
from ..simulation.counter_rng import STREAM_REALIZATION, STREAM_THINNING, counter_generator, derive_seed
from ..utils.file_utils import ensure_parent_dir, memory_usage_mb

# Get logger
logger = logging.getLogger('mpr_gapfill')


@dataclass(frozen=True)
class ThinningSpec:
    p: float
    realizations: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ConfigError(f"Thinning ratio p must be in (0, 1), got {self.p}")
        if self.realizations < 1:
            raise ConfigError(f"Realization count M must be at least 1, got {self.realizations}")

    def n_removed(self, n_samples: int) -> int:
        """round(p * n), halves rounded up."""
        return int(math.floor(self.p * n_samples + 0.5))


@dataclass(frozen=True)
class Thinning:
    """One realization: the thinned grid plus the held-out mask and true values (row-major)."""

    index: int
    grid: GridField
    held_out: np.ndarray
    truth: np.ndarray

    @property
    def n_held_out(self) -> int:
        return int(self.truth.size)


def make_thinning(grid: GridField, spec: ThinningSpec, index: int) -> Thinning:
    """Realization ``index``: a uniform draw without replacement over the SAMPLE sites."""
    sample_sites = np.flatnonzero(grid.mask)
    n_remove = spec.n_removed(sample_sites.size)
    if n_remove >= sample_sites.size:
        raise NoSamplesError(f"Removing {n_remove} of {sample_sites.size} samples leaves none")
    if n_remove == 0:
        raise ConfigError(f"p={spec.p} removes no site from {sample_sites.size} samples")

    chosen = counter_generator(spec.seed, STREAM_THINNING, index).choice(sample_sites, size=n_remove, replace=False)
    held_out = np.zeros(grid.shape, dtype=bool)
    held_out.flat[chosen] = True
    held_out.setflags(write=False)
    truth = grid.filled(0.0)[held_out]
    return Thinning(index, grid.without_sites(held_out), held_out, truth)


def iter_thinnings(grid: GridField, spec: ThinningSpec) -> Iterator[Thinning]:
    for index in range(spec.realizations):
        yield make_thinning(grid, spec, index)


def make_thinnings(grid: GridField, spec: ThinningSpec) -> List[Thinning]:
    return list(iter_thinnings(grid, spec))


@dataclass(frozen=True)
class ErrorStats:
    aae: float
    rase: float
    n_sites: int


def score(predicted: GridField, held_out: np.ndarray, truth: np.ndarray) -> ErrorStats:
    """AAE and RASE of ``predicted`` over the held-out sites."""
    held_out = np.asarray(held_out, dtype=bool)
    if held_out.shape != predicted.shape:
        raise ScoringError(f"Held-out mask shape {held_out.shape} does not match prediction {predicted.shape}")
    unpredicted = np.count_nonzero(held_out & ~predicted.mask)
    if unpredicted:
        raise ScoringError(f"{unpredicted} held-out sites have no prediction")
    truth = np.asarray(truth, dtype=np.float64)
    if truth.size != np.count_nonzero(held_out):
        raise ScoringError(f"Got {truth.size} true values for {np.count_nonzero(held_out)} held-out sites")
    if truth.size == 0:
        raise ScoringError("No held-out sites to score")
    errors = truth - predicted.filled(0.0)[held_out]
    aae = float(np.mean(np.abs(errors)))
    rase = float(np.sqrt(np.mean(errors * errors)))
    # RASE >= AAE
    return ErrorStats(aae, max(rase, aae), int(truth.size))


@dataclass(frozen=True)
class MethodSpec:
    """A method plus an optional block size (bst/sst) or search radius (idw), and SST passes."""

    method: Method
    param: Optional[float] = None
    passes: Optional[int] = None

    @property
    def label(self) -> str:
        if self.param is None and self.passes is None:
            return self.method.short_name
        label = f"{self.method.short_name}@"
        if self.param is not None:
            label += str(int(self.param) if float(self.param).is_integer() else self.param)
        if self.passes is not None:
            label += f":{self.passes}"
        return label

    @property
    def block_size(self) -> Optional[int]:
        if self.param is None or self.method not in (Method.SVMPR_BST, Method.SVMPR_SST):
            return None
        return int(self.param)

    @property
    def radius(self) -> Optional[float]:
        return float(self.param) if self.param is not None and self.method is Method.IDW else None


def parse_method_token(token: str) -> MethodSpec:
    """Parse 'mpr', 'bst', 'sst@8', 'sst@16:3', 'sst@:0' or 'idw@5.5'."""
    name, _, param = token.strip().partition('@')
    method = Method.from_token(name)
    if not param:
        return MethodSpec(method)
    if method is Method.MPR:
        raise ConfigError(f"Method token {token!r}: mpr takes no parameter")

    param, colon, passes_text = param.partition(':')
    passes = None
    if colon:
        if method is not Method.SVMPR_SST:
            raise ConfigError(f"Method token {token!r}: only sst takes a smoothing pass count")
        try:
            passes = int(passes_text)
        except ValueError:
            raise ConfigError(f"Method token {token!r}: pass count {passes_text!r} is not an integer") from None
        if passes < 0:
            raise ConfigError(f"Method token {token!r}: pass count must be non-negative")
    if not param:
        if passes is None:
            raise ConfigError(f"Method token {token!r}: empty parameter")
        return MethodSpec(method, None, passes)

    try:
        value = float(param)
    except ValueError:
        raise ConfigError(f"Method token {token!r}: parameter {param!r} is not a number") from None
    if method is Method.IDW:
        if not value > 0:
            raise ConfigError(f"Method token {token!r}: IDW radius must be positive")
    elif not (value.is_integer() and value >= 2):
        raise ConfigError(f"Method token {token!r}: block size must be an integer >= 2")
    return MethodSpec(method, value, passes)


@dataclass
class MethodSummary:
    spec: MethodSpec
    aae: List[Optional[float]] = field(default_factory=list)
    rase: List[Optional[float]] = field(default_factory=list)
    runtimes: List[float] = field(default_factory=list)
    failures: Dict[int, str] = field(default_factory=dict)
    ratio_maae: Optional[float] = None
    ratio_mrase: Optional[float] = None
    win_rate: Optional[float] = None

    @property
    def label(self) -> str:
        return self.spec.label

    def _mean(self, values) -> Optional[float]:
        ok = [v for v in values if v is not None]
        return float(np.mean(ok)) if ok else None

    @property
    def maae(self) -> Optional[float]:
        return self._mean(self.aae)

    @property
    def mrase(self) -> Optional[float]:
        return self._mean(self.rase)

    @property
    def mean_runtime(self) -> float:
        return float(np.mean(self.runtimes)) if self.runtimes else 0.0

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'method': self.spec.method.value,
            'param': self.spec.param,
            'passes': self.spec.passes,
            'maae': self.maae,
            'mrase': self.mrase,
            'mean_runtime_seconds': self.mean_runtime,
            'total_runtime_seconds': float(sum(self.runtimes)),
            'ratio_maae': self.ratio_maae,
            'ratio_mrase': self.ratio_mrase,
            'win_rate': self.win_rate,
            'failures': {str(k): v for k, v in self.failures.items()},
            'aae': self.aae,
            'rase': self.rase,
            'runtimes': self.runtimes,
        }


def _ratio(value: Optional[float], reference: Optional[float]) -> Optional[float]:
    if value is None or not reference:
        return None
    return value / reference


@dataclass
class ValidationReport:
    p: float
    realizations: int
    seed: int
    shape: tuple
    methods: List[MethodSummary]
    reference: str
    calibration_seconds: float = 0.0
    total_seconds: float = 0.0
    memory_mb: float = 0.0
    config: dict = field(default_factory=dict)

    def method(self, label: str) -> MethodSummary:
        for summary in self.methods:
            if summary.label == label:
                return summary
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            'p': self.p,
            'realizations': self.realizations,
            'seed': self.seed,
            'shape': list(self.shape),
            'reference': self.reference,
            'calibration_seconds': self.calibration_seconds,
            'total_seconds': self.total_seconds,
            'memory_mb': self.memory_mb,
            'methods': [m.to_dict() for m in self.methods],
            'config': self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        def fmt(value, spec='.4g'):
            return '-' if value is None else format(value, spec)

        lines = [f"p = {self.p}, M = {self.realizations}, grid {self.shape[0]}x{self.shape[1]}, "
                 f"reference = {self.reference}",
                 f"{'method':<12}{'MAAE':>12}{'MRASE':>12}{'t [s]':>10}{'MAAE/ref':>10}{'MRASE/ref':>11}"
                 f"{'win rate':>10}{'failed':>8}"]
        for m in self.methods:
            lines.append(f"{m.label:<12}{fmt(m.maae):>12}{fmt(m.mrase):>12}{m.mean_runtime:>10.3f}"
                         f"{fmt(m.ratio_maae, '.3f'):>10}{fmt(m.ratio_mrase, '.3f'):>11}"
                         f"{fmt(m.win_rate, '.2f'):>10}{len(m.failures):>8}")
        lines.append(f"calibration: {self.calibration_seconds:.2f}s, total: {self.total_seconds:.2f}s")
        return '\n'.join(lines)

    def write(self, path: str) -> None:
        ensure_parent_dir(path)
        with open(path, 'w') as f:
            f.write(self.to_json() + '\n')


def _choose_reference(specs: Sequence[MethodSpec], reference: Optional[str]) -> int:
    labels = [s.label for s in specs]
    if reference is not None:
        if reference in labels:
            return labels.index(reference)
        wanted = parse_method_token(reference).label
        if wanted not in labels:
            raise ConfigError(f"Reference method {reference!r} is not among {labels}")
        return labels.index(wanted)
    for i, spec in enumerate(specs):
        if spec.method is Method.MPR:
            return i
    return 0


def compare_methods(grid: GridField, spec: ThinningSpec, methods: Sequence[Union[str, MethodSpec]],
                    filler: GapFiller, reference: Optional[str] = None, progress: bool = True) -> ValidationReport:
    """
    Run every method on every thinning realization and aggregate the errors.

    Args:
        grid: Ground-truth grid
        spec: Thinning ratio, realization count and seed
        methods: Method tokens or MethodSpecs
        filler: Configured gap filler (its calibration curve is resolved up front)
        reference: Label of the method used as ratio denominator (first mpr if None)
        progress: Show a progress bar

    Returns:
        ValidationReport aggregated in realization-index order
    """
    specs = [parse_method_token(m) if isinstance(m, str) else m for m in methods]
    if not specs:
        raise ConfigError("At least one method is required")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        logger.warning(f"{Fore.YELLOW}Duplicate method entries: {labels}{Style.RESET_ALL}")
    ref_index = _choose_reference(specs, reference)

    calibration_seconds = 0.0
    if any(s.method is not Method.IDW for s in specs):
        _ = filler.curve
        calibration_seconds = filler.calibration_seconds

    summaries = [MethodSummary(s) for s in specs]
    logger.info(f"Validating {', '.join(labels)} on {grid.shape[0]}x{grid.shape[1]} grid: "
                f"p={spec.p}, M={spec.realizations}")
    start_time = time.time()

    with tqdm(
        total=spec.realizations,
        desc=f"{Fore.GREEN}Thinning realizations{Style.RESET_ALL}",
        unit="run",
        bar_format='{desc}: |{bar:30}| {percentage:3.0f}% | {n_fmt}/{total_fmt} realizations',
        colour='green',
        disable=not progress
    ) as pbar:
        for thinning in iter_thinnings(grid, spec):
            sim_seed = derive_seed(spec.seed, STREAM_REALIZATION, thinning.index)
            for method_spec, summary in zip(specs, summaries):
                run_start = time.time()
                try:
                    result = filler.fill(thinning.grid, method_spec.method, seed=sim_seed,
                                         block_size=method_spec.block_size, radius=method_spec.radius,
                                         smoothing_passes=method_spec.passes)
                    stats = score(result.grid, thinning.held_out, thinning.truth)
                    summary.aae.append(stats.aae)
                    summary.rase.append(stats.rase)
                except GapFillError as e:
                    logger.warning(f"{Fore.YELLOW}{method_spec.label} failed on realization {thinning.index}: "
                                   f"{e.error_class}: {e}{Style.RESET_ALL}")
                    summary.aae.append(None)
                    summary.rase.append(None)
                    summary.failures[thinning.index] = e.error_class
                summary.runtimes.append(time.time() - run_start)
            pbar.update(1)

    total_seconds = time.time() - start_time
    ref = summaries[ref_index]
    for summary in summaries:
        summary.ratio_maae = _ratio(summary.maae, ref.maae)
        summary.ratio_mrase = _ratio(summary.mrase, ref.mrase)
        if summary is ref:
            continue
        paired = [(a, b) for a, b in zip(summary.rase, ref.rase) if a is not None and b is not None]
        if paired:
            summary.win_rate = sum(1 for a, b in paired if a < b) / len(paired)

    for summary in summaries:
        logger.info(f"{summary.label}: MAAE={summary.maae}, MRASE={summary.mrase}, "
                    f"t={summary.mean_runtime:.3f}s, failed={len(summary.failures)}")

    return ValidationReport(spec.p, spec.realizations, spec.seed, grid.shape, summaries, ref.label,
                            calibration_seconds, total_seconds, memory_usage_mb(),
                            filler.config.to_dict())
