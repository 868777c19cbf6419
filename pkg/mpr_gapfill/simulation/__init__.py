"""
Checkerboard Metropolis simulation of the MPR model.
"""

from .counter_rng import counter_generator, derive_seed
from .simulation_engine import (
    CheckerboardSampler,
    EnergyTrace,
    InitStrategy,
    PredictionAccumulator,
    SimulationConfig,
    SimulationDiagnostics,
    SimulationResult,
    detect_equilibrium,
    first_equilibrium,
    initialize_angles,
    metropolis_sweep,
    run_conditional_simulation,
    run_unconditional_simulation,
    slope_test,
)

__all__ = ['CheckerboardSampler', 'EnergyTrace', 'InitStrategy', 'PredictionAccumulator',
           'SimulationConfig', 'SimulationDiagnostics', 'SimulationResult', 'counter_generator',
           'derive_seed', 'detect_equilibrium', 'first_equilibrium', 'initialize_angles',
           'metropolis_sweep', 'run_conditional_simulation', 'run_unconditional_simulation', 'slope_test']
