import argparse

import pytest

from mpr_gapfill.baseline import NoNeighborPolicy
from mpr_gapfill.config import Method, RunConfig, default_threads
from mpr_gapfill.exceptions import ConfigError
from mpr_gapfill.simulation import InitStrategy


def test_defaults():
    config = RunConfig()
    assert config.method is Method.MPR
    assert (config.n_fit, config.n_f, config.m_avg) == (20, 5, 100)
    assert config.resolved_smoothing_radius == 8.0
    assert config.methods == ['mpr', 'bst', 'sst']
    assert config.t_grid().size == 48


@pytest.mark.parametrize("token, method", [
    ('mpr', Method.MPR), ('bst', Method.SVMPR_BST), ('SST', Method.SVMPR_SST),
    ('svmpr-bst', Method.SVMPR_BST), ('idw', Method.IDW),
])
def test_method_tokens(token, method):
    assert Method.from_token(token) is method


def test_unknown_method():
    with pytest.raises(ConfigError):
        Method.from_token('kriging')


def test_init_strategy_auto():
    config = RunConfig()
    assert config.init_strategy(Method.MPR) is InitStrategy.RANDOM
    assert config.init_strategy(Method.SVMPR_SST) is InitStrategy.BLOCK_MEAN
    assert RunConfig(init='random').init_strategy(Method.SVMPR_BST) is InitStrategy.RANDOM


@pytest.mark.parametrize("kwargs", [
    {'block_size': 1}, {'smoothing_radius': 0.5}, {'smoothing_passes': -1}, {'p': 1.0}, {'realizations': 0},
    {'q': 0.8}, {'coupling': -1.0}, {'m_avg': 0}, {'max_sweeps': 10}, {'idw_radius': 0}, {'cal_points': 1},
    {'init': 'zeros'}, {'threads': 0},
])
def test_invalid_values(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_dict_round_trip():
    config = RunConfig(method='sst', block_size=16, idw_policy='error', seed=4)
    data = config.to_dict()
    assert data['method'] == 'svmpr-sst'
    assert data['smoothing_radius'] == 4.0
    again = RunConfig.from_dict(data)
    assert again.method is Method.SVMPR_SST
    assert again.idw_policy is NoNeighborPolicy.ERROR
    assert again.block_size == 16 and again.seed == 4
    with pytest.raises(ConfigError):
        RunConfig.from_dict({'bogus': 1})


def test_from_args(monkeypatch):
    monkeypatch.delenv('MPR_THREADS', raising=False)
    args = argparse.Namespace(method='svmpr-bst', lb=8, J=2.0, mavg=7, M=3, methods='mpr, idw@4 ,', seed=None)
    config = RunConfig.from_args(args)
    assert config.method is Method.SVMPR_BST
    assert config.block_size == 8 and config.coupling == 2.0 and config.m_avg == 7
    assert config.realizations == 3
    assert config.methods == ['mpr', 'idw@4']
    assert config.seed == 0
    assert config.threads == 1


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv('MPR_THREADS', '3')
    assert default_threads() == 3
    assert RunConfig.from_args(argparse.Namespace()).threads == 3
    monkeypatch.setenv('MPR_THREADS', 'many')
    with pytest.raises(ConfigError):
        default_threads()
