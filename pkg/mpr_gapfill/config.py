#!/usr/bin/env python3
"""
Run configuration for the MPR gap-filling package.

RunConfig holds every tunable parameter with its default, converts itself into
the per-module parameter objects and serializes to a plain dict that is
embedded in every report so a result can be re-run from its own output.
"""

import os
import logging
from dataclasses import dataclass, field, fields, asdict
from enum import Enum
from typing import List, Optional

from dotenv import load_dotenv

from .baseline.idw_interpolator import IdwParams, NoNeighborPolicy
from .calibration.calibration_curve import (DEFAULT_CALIBRATION_SEED, DEFAULT_POINTS, DEFAULT_REF_SIZE,
                                            DEFAULT_SWEEPS, DEFAULT_T_MAX, DEFAULT_T_MIN, default_t_grid)
from .exceptions import ConfigError
from .model.mpr_model import MprParams
from .simulation.simulation_engine import InitStrategy, SimulationConfig

# Get logger
logger = logging.getLogger('mpr_gapfill')

THREADS_ENV = 'MPR_THREADS'


class Method(Enum):
    MPR = 'mpr'
    SVMPR_BST = 'svmpr-bst'
    SVMPR_SST = 'svmpr-sst'
    IDW = 'idw'

    @classmethod
    def from_token(cls, token: str) -> 'Method':
        """Accept both CLI names ('svmpr-bst') and short tokens ('bst')."""
        token = token.strip().lower()
        aliases = {'bst': cls.SVMPR_BST, 'sst': cls.SVMPR_SST}
        if token in aliases:
            return aliases[token]
        try:
            return cls(token)
        except ValueError:
            raise ConfigError(f"Unknown method {token!r}; expected one of mpr, bst, sst, idw") from None

    @property
    def short_name(self) -> str:
        return {Method.MPR: 'mpr', Method.SVMPR_BST: 'bst', Method.SVMPR_SST: 'sst', Method.IDW: 'idw'}[self]


def default_threads() -> int:
    """Worker count from $MPR_THREADS (a .env file is honoured), else 1."""
    load_dotenv()
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1, got {threads}")
    return threads


@dataclass
class RunConfig:
    """All parameters of a fill, calibration or validation run."""

    method: Method = Method.MPR
    q: float = 0.5
    coupling: float = 1.0

    # Block and smoothing parameters of the SV variants
    block_size: int = 32
    smoothing_radius: Optional[float] = None
    smoothing_passes: int = 5
    init: str = 'auto'
    fallback_temperature: Optional[float] = None

    # Sweep schedule
    n_fit: int = 20
    n_f: int = 5
    max_sweeps: int = 500
    m_avg: int = 100
    slope_tolerance: Optional[float] = None

    # IDW baseline
    idw_power: float = 2.0
    idw_radius: float = 8.0
    idw_policy: NoNeighborPolicy = NoNeighborPolicy.NEAREST_FALLBACK

    seed: int = 0
    threads: int = 1

    # Calibration curve
    cal_size: int = DEFAULT_REF_SIZE
    cal_points: int = DEFAULT_POINTS
    cal_t_min: float = DEFAULT_T_MIN
    cal_t_max: float = DEFAULT_T_MAX
    cal_sweeps: int = DEFAULT_SWEEPS
    cal_seed: int = DEFAULT_CALIBRATION_SEED
    calibration_dir: Optional[str] = None

    # Validation
    p: float = 0.5
    realizations: int = 100
    methods: List[str] = field(default_factory=lambda: ['mpr', 'bst', 'sst'])
    reference: Optional[str] = None

    input_path: Optional[str] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.method, str):
            self.method = Method.from_token(self.method)
        if isinstance(self.idw_policy, str):
            self.idw_policy = NoNeighborPolicy(self.idw_policy)
        if self.block_size < 2:
            raise ConfigError(f"Block size l_b must be at least 2, got {self.block_size}")
        if self.smoothing_radius is not None and not self.smoothing_radius >= 1:
            raise ConfigError(f"Smoothing radius r_s must be at least 1, got {self.smoothing_radius}")
        if self.smoothing_passes < 0:
            raise ConfigError(f"Smoothing passes n_s must be non-negative, got {self.smoothing_passes}")
        if self.init not in ('auto', 'random', 'block-mean'):
            raise ConfigError(f"Unknown init strategy {self.init!r}")
        if self.fallback_temperature is not None and not self.fallback_temperature >= 0:
            raise ConfigError(f"Fallback temperature must be non-negative, got {self.fallback_temperature}")
        if not 0 < self.p < 1:
            raise ConfigError(f"Thinning ratio p must be in (0, 1), got {self.p}")
        if self.realizations < 1:
            raise ConfigError(f"Realization count M must be at least 1, got {self.realizations}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        # Validate module parameters
        self.model_params()
        self.sim_config()
        self.idw_params()
        self.t_grid()

    @property
    def resolved_smoothing_radius(self) -> float:
        if self.smoothing_radius is not None:
            return float(self.smoothing_radius)
        return max(1.0, self.block_size / 4.0)

    def init_strategy(self, method: Optional[Method] = None) -> InitStrategy:
        """'auto' starts MPR from random angles and the SV variants from block means."""
        if self.init == 'random':
            return InitStrategy.RANDOM
        if self.init == 'block-mean':
            return InitStrategy.BLOCK_MEAN
        method = method or self.method
        return InitStrategy.RANDOM if method is Method.MPR else InitStrategy.BLOCK_MEAN

    def model_params(self) -> MprParams:
        return MprParams(coupling=self.coupling, q=self.q)

    def sim_config(self, seed: Optional[int] = None, method: Optional[Method] = None) -> SimulationConfig:
        return SimulationConfig(n_fit=self.n_fit, n_f=self.n_f, max_sweeps=self.max_sweeps, m_avg=self.m_avg,
                                seed=self.seed if seed is None else seed,
                                init_strategy=self.init_strategy(method),
                                slope_tolerance=self.slope_tolerance, threads=self.threads)

    def idw_params(self, radius: Optional[float] = None) -> IdwParams:
        return IdwParams(power=self.idw_power, radius=self.idw_radius if radius is None else radius,
                         policy=self.idw_policy)

    def t_grid(self):
        return default_t_grid(self.cal_points, self.cal_t_min, self.cal_t_max)

    def to_dict(self) -> dict:
        """Fully resolved configuration for the report echo."""
        data = asdict(self)
        data['method'] = self.method.value
        data['idw_policy'] = self.idw_policy.value
        data['smoothing_radius'] = self.resolved_smoothing_radius
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_args(cls, args) -> 'RunConfig':
        """Map parsed CLI flags onto a RunConfig; flags a subcommand lacks keep their defaults."""
        mapping = {
            'method': 'method', 'q': 'q', 'J': 'coupling', 'lb': 'block_size', 'rs': 'smoothing_radius',
            'ns': 'smoothing_passes', 'init': 'init', 'fallback_temperature': 'fallback_temperature',
            'nfit': 'n_fit', 'nf': 'n_f', 'max_sweeps': 'max_sweeps', 'mavg': 'm_avg',
            'slope_tol': 'slope_tolerance', 'beta': 'idw_power', 'radius': 'idw_radius',
            'idw_policy': 'idw_policy', 'seed': 'seed', 'threads': 'threads', 'cal_size': 'cal_size',
            'cal_points': 'cal_points', 'cal_tmin': 'cal_t_min', 'cal_tmax': 'cal_t_max',
            'cal_sweeps': 'cal_sweeps', 'cal_seed': 'cal_seed', 'calibration_dir': 'calibration_dir',
            'p': 'p', 'M': 'realizations', 'reference': 'reference', 'input': 'input_path',
            'output': 'output_path',
        }
        values = {}
        for flag, name in mapping.items():
            value = getattr(args, flag, None)
            if value is not None:
                values[name] = value
        methods = getattr(args, 'methods', None)
        if methods:
            values['methods'] = [token.strip() for token in methods.split(',') if token.strip()]
        if 'threads' not in values:
            values['threads'] = default_threads()
        return cls(**values)
