import math

import numpy as np
import pytest

from cgcwm.ecm import FitConfig
from cgcwm.model import count_free_parameters, sample_dataset, samples_to_arrays
from cgcwm.selection import bic, select_k
from cgcwm.simulate import scenario_params

from conftest import random_cwm_params


class TestBic:
    def test_hand_arithmetic(self):
        value = bic(-1800.0, 37, 270)
        assert value == pytest.approx(-3600.0 - 37.0 * math.log(270.0), abs=1e-10)
        assert value == pytest.approx(-3807.14, abs=0.01)

    def test_zero_parameters(self):
        assert bic(-12.5, 0, 50) == -25.0

    def test_doubling_n_costs_m_log_two(self):
        m = 9
        assert bic(-100.0, m, 100) - bic(-100.0, m, 200) == pytest.approx(
            m * math.log(2.0), abs=1e-10
        )

    def test_family_parameter_gap_is_4k(self, rng):
        for k in (1, 2, 3):
            params = random_cwm_params(rng, k=k)
            gap = count_free_parameters(params, True) - count_free_parameters(params, False)
            assert gap == 4 * k


@pytest.fixture(scope="module")
def scenario_data():
    data, *_ = samples_to_arrays(
        sample_dataset(scenario_params("A"), 200, np.random.default_rng(31))
    )
    return data


class TestSelectK:
    def test_gaussian_family_picks_two_components(self, scenario_data):
        config = FitConfig(k=1, d_x=2, d_y=2, seed=5, restarts=2)
        result = select_k(scenario_data, [1, 2, 3], config, family="gaussian")
        assert result.best_k == 2
        assert [e.k for e in result.table] == [1, 2, 3]
        assert all(e.error is None for e in result.table)

    def test_single_candidate(self, scenario_data):
        config = FitConfig(k=1, d_x=2, d_y=2, seed=5, restarts=1)
        result = select_k(scenario_data, [1], config, family="gaussian")
        assert result.best_k == 1

    def test_deterministic(self, scenario_data):
        config = FitConfig(k=1, d_x=2, d_y=2, seed=9, restarts=2)
        a = select_k(scenario_data, [1, 2], config, family="contaminated")
        b = select_k(scenario_data, [1, 2], config, family="contaminated")
        assert [e.bic for e in a.table] == [e.bic for e in b.table]

    def test_failed_candidates_recorded_not_fatal(self, rng):
        # nine observations cannot hold three components of four-plus mass
        data = rng.standard_normal((9, 2))
        config = FitConfig(k=1, d_x=1, d_y=1, seed=0, restarts=2)
        result = select_k(data, [1, 3], config, family="gaussian")
        by_k = {e.k: e for e in result.table}
        assert by_k[1].error is None
        assert by_k[3].error is not None
        assert by_k[3].bic is None
        assert result.best_k == 1
