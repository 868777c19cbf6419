"""
Equilibrium energy curve e(T) and energy-matching temperature inference.
"""

from .calibration_curve import (
    CalibrationCurve,
    TemperatureEstimate,
    build_calibration_curve,
    calibration_dir,
    default_t_grid,
    estimate_temperature,
    load_curve,
    load_or_build_curve,
    save_curve,
)

__all__ = ['CalibrationCurve', 'TemperatureEstimate', 'build_calibration_curve', 'calibration_dir',
           'default_t_grid', 'estimate_temperature', 'load_curve', 'load_or_build_curve', 'save_curve']
