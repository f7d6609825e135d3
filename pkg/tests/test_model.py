import json
import math

import numpy as np
import pytest

from cgcwm.densities import factor_covariance, log_contaminated_pdf, log_gaussian_pdf
from cgcwm.errors import DimensionMismatch
from cgcwm.model import (
    ComponentParams,
    ContaminatedBlock,
    CwmParams,
    RegressionBlock,
    conditional_y_log_density,
    count_free_parameters,
    joint_log_density,
    marginal_x_log_density,
    params_from_json,
    params_to_json,
    sample_dataset,
    samples_to_arrays,
)
from cgcwm.simulate import scenario_params

from conftest import random_cwm_params


def _single_component(alpha=1.0, eta=1.0):
    return CwmParams(
        components=(
            ComponentParams(
                pi=1.0,
                x_block=ContaminatedBlock(mu=[0.5], sigma=[[2.0]], alpha=alpha, eta=eta),
                y_block=RegressionBlock(
                    beta=[[1.0], [2.0]], sigma=[[0.3]], alpha=alpha, eta=eta
                ),
            ),
        ),
        d_x=1,
        d_y=1,
    )


class TestJointDensity:
    def test_gaussian_limit_factorizes(self):
        params = _single_component(alpha=1.0, eta=1.0)
        x, y = np.array([1.2]), np.array([0.7])
        fx = factor_covariance(np.array([[2.0]]))
        fy = factor_covariance(np.array([[0.3]]))
        expected = log_gaussian_pdf(y, [1.0 + 2.0 * 1.2], fy) + log_gaussian_pdf(x, [0.5], fx)
        assert joint_log_density(x, y, params) == pytest.approx(expected, abs=1e-9)

    def test_duplicate_components_collapse(self, rng):
        single = random_cwm_params(rng, k=1)
        comp = single.components[0]
        halved = ComponentParams(pi=0.5, x_block=comp.x_block, y_block=comp.y_block)
        doubled = CwmParams(components=(halved, halved), d_x=single.d_x, d_y=single.d_y)
        x = rng.standard_normal(single.d_x)
        y = rng.standard_normal(single.d_y)
        assert joint_log_density(x, y, doubled) == pytest.approx(
            joint_log_density(x, y, single), abs=1e-12
        )

    def test_dimension_mismatch(self):
        params = _single_component()
        with pytest.raises(DimensionMismatch):
            joint_log_density([1.0, 2.0], [0.0], params)

    def test_factorization_identity_random(self, rng):
        for _ in range(100):
            params = random_cwm_params(rng, k=int(rng.integers(1, 4)))
            x = rng.uniform(-8, 8, size=params.d_x)
            y = rng.uniform(-8, 8, size=params.d_y)
            joint = joint_log_density(x, y, params)
            split = marginal_x_log_density(x, params) + conditional_y_log_density(y, x, params)
            assert joint == pytest.approx(split, abs=1e-10)


class TestMarginal:
    def test_single_component_is_block_density(self):
        params = _single_component(alpha=0.9, eta=30.0)
        f = factor_covariance(np.array([[2.0]]))
        expected = log_contaminated_pdf([1.1], [0.5], f, 0.9, 30.0)
        assert marginal_x_log_density([1.1], params) == pytest.approx(expected, abs=1e-12)

    def test_integrates_to_one_1d_mixture(self, rng):
        params = random_cwm_params(rng, k=2, d_x=1, d_y=1)
        grid = np.linspace(-150.0, 150.0, 120001)
        vals = np.array([math.exp(marginal_x_log_density([g], params)) for g in grid])
        assert np.trapezoid(vals, grid) == pytest.approx(1.0, abs=1e-4)

    def test_far_separated_components_local_value(self):
        blocks = []
        for mu, pi in ((-50.0, 0.4), (50.0, 0.6)):
            blocks.append(
                ComponentParams(
                    pi=pi,
                    x_block=ContaminatedBlock(mu=[mu], sigma=[[1.0]], alpha=0.95, eta=2.0),
                    y_block=RegressionBlock(beta=[[0.0], [1.0]], sigma=[[1.0]],
                                            alpha=0.95, eta=2.0),
                )
            )
        params = CwmParams(components=tuple(blocks), d_x=1, d_y=1)
        f = factor_covariance(np.array([[1.0]]))
        local = math.log(0.4) + log_contaminated_pdf([-50.0], [-50.0], f, 0.95, 2.0)
        assert marginal_x_log_density([-50.0], params) == pytest.approx(local, abs=1e-6)


class TestConditional:
    def test_reduces_to_block_density_single_component(self):
        params = _single_component(alpha=0.85, eta=10.0)
        f = factor_covariance(np.array([[0.3]]))
        expected = log_contaminated_pdf([0.4], [1.0 + 2.0 * 0.6], f, 0.85, 10.0)
        assert conditional_y_log_density([0.4], [0.6], params) == pytest.approx(
            expected, abs=1e-12
        )

    def test_shared_covariate_blocks_reduce_to_static_mixture(self, rng):
        # with identical x blocks the covariate-dependent weights collapse
        # to the mixture weights, for every x
        shared = ContaminatedBlock(mu=[0.0, 1.0], sigma=np.eye(2), alpha=0.9, eta=20.0)
        comps = []
        for pi in (0.3, 0.7):
            comps.append(
                ComponentParams(
                    pi=pi,
                    x_block=shared,
                    y_block=RegressionBlock(
                        beta=rng.uniform(-2, 2, size=(3, 2)),
                        sigma=np.eye(2) * 0.5,
                        alpha=0.9,
                        eta=15.0,
                    ),
                )
            )
        params = CwmParams(components=tuple(comps), d_x=2, d_y=2)
        y = rng.standard_normal(2)
        for _ in range(20):
            # the mixture weights lose their x dependence; the local
            # regression means of course keep theirs
            x = rng.uniform(-10, 10, size=2)
            direct = [
                math.log(c.pi) + float(c.y_block.log_pdf_rows(y[None, :], x[None, :])[0])
                for c in comps
            ]
            expected = float(np.logaddexp(*direct))
            assert conditional_y_log_density(y, x, params) == pytest.approx(
                expected, abs=1e-12
            )


class TestParameterCount:
    def test_two_components_bivariate(self, rng):
        params = random_cwm_params(rng, k=2, d_x=2, d_y=2)
        assert count_free_parameters(params) == 37

    def test_one_component_univariate(self, rng):
        params = random_cwm_params(rng, k=1, d_x=1, d_y=1)
        assert count_free_parameters(params) == 9

    def test_gaussian_variant_drops_contamination_terms(self, rng):
        params = random_cwm_params(rng, k=2, d_x=2, d_y=2)
        assert count_free_parameters(params, contaminated=False) == 29

    def test_additive_in_k(self, rng):
        counts = [
            count_free_parameters(random_cwm_params(rng, k=k, d_x=3, d_y=2))
            for k in (1, 2, 3, 4)
        ]
        steps = np.diff(counts)
        assert len(set(steps)) == 1


class TestSampling:
    def test_component_frequency_matches_weights(self):
        params = scenario_params("B")
        rng = np.random.default_rng(5)
        samples = sample_dataset(params, 100_000, rng)
        _, comp, _, _ = samples_to_arrays(samples)
        assert np.mean(comp == 1) == pytest.approx(0.3, abs=0.01)

    def test_all_typical_when_alpha_one(self):
        params = scenario_params("A")
        samples = sample_dataset(params, 500, np.random.default_rng(0))
        assert all(s.x_typical and s.y_typical for s in samples)

    def test_typical_group_mean(self):
        params = scenario_params("B")
        samples = sample_dataset(params, 100_000, np.random.default_rng(11))
        data, comp, x_typ, _ = samples_to_arrays(samples)
        sel = (comp == 2) & x_typ
        assert np.allclose(data[sel, :2].mean(axis=0), [5.0, 5.0], atol=0.05)

    def test_reproducible_given_seed(self):
        params = scenario_params("B")
        a, *_ = samples_to_arrays(sample_dataset(params, 200, np.random.default_rng(3)))
        b, *_ = samples_to_arrays(sample_dataset(params, 200, np.random.default_rng(3)))
        assert np.array_equal(a, b)

    def test_loglik_self_consistency(self):
        # mean joint log-density agrees across two independent samples
        # within Monte Carlo error
        params = scenario_params("B")
        rng = np.random.default_rng(911)
        values = []
        for _ in range(2):
            data, *_ = samples_to_arrays(sample_dataset(params, 100_000, rng))
            from cgcwm.ecm import _component_stats
            from scipy.special import logsumexp

            _, _, log_fx, log_fy = _component_stats(data, params)
            row = logsumexp(params.log_pi[None, :] + log_fx + log_fy, axis=1)
            values.append((row.mean(), row.var(ddof=1) / row.size))
        diff = abs(values[0][0] - values[1][0])
        se = math.sqrt(values[0][1] + values[1][1])
        assert diff < 3.0 * se


class TestJsonRoundTrip:
    def test_contaminated_round_trip(self, rng):
        params = random_cwm_params(rng, k=3, d_x=2, d_y=2)
        restored = params_from_json(params_to_json(params))
        assert restored.k == params.k
        for a, b in zip(restored.components, params.components):
            assert a.pi == b.pi
            assert np.array_equal(a.x_block.mu, b.x_block.mu)
            assert np.array_equal(a.x_block.sigma, b.x_block.sigma)
            assert a.x_block.alpha == b.x_block.alpha
            assert a.x_block.eta == b.x_block.eta
            assert np.array_equal(a.y_block.beta, b.y_block.beta)
            assert np.array_equal(a.y_block.sigma, b.y_block.sigma)

    def test_gaussian_schema_omits_contamination(self, rng):
        params = random_cwm_params(rng, k=2, contaminated=False)
        payload = json.loads(params_to_json(params, contaminated=False))
        assert "alpha_x" not in payload["components"][0]
        restored = params_from_json(json.dumps(payload))
        assert restored.components[0].x_block.alpha == 1.0
        assert restored.components[0].y_block.eta == 1.0

    def test_matrices_row_major(self, rng):
        params = random_cwm_params(rng, k=1, d_x=2, d_y=1)
        payload = json.loads(params_to_json(params))
        beta = params.components[0].y_block.beta
        assert payload["components"][0]["beta"] == [list(row) for row in beta.tolist()]
