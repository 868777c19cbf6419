"""
Inverse-distance-weighted baseline interpolator.
"""

from .idw_interpolator import IdwParams, IdwResult, NoNeighborPolicy, idw_predict, min_full_coverage_radius

__all__ = ['IdwParams', 'IdwResult', 'NoNeighborPolicy', 'idw_predict', 'min_full_coverage_radius']
