import math

import numpy as np
import pytest

from adacube.bc import (
    BCSettings,
    EmpiricalBayesFitter,
    GridCandidates,
    LinearLengthscalePenalty,
    MCMCConfig,
    Method,
    MidpointCandidates,
    Regularizer,
    StopReason,
    StopRule,
    SurrogateModel,
    adap_bc,
    candidate_set_1d,
    candidate_set_grid,
    e_adap_bc,
    fit_theta_eb,
    metropolis,
    regularizer_value,
    run_bc,
    scale_schedule,
    scheduled_count,
    std_bc,
    total_variance_estimate,
)
from adacube.bc.nodes import AcquireNode, FinalizeNode, FitNode
from adacube.embeddings import DoubleIntegralMethod, PosteriorIntegral
from adacube.exceptions import EvaluationError, InvalidInputError
from adacube.gp import Dataset
from adacube.kernels import FieldKind, LengthscaleField, ProductKernelSpec
from adacube.synthetic.integrand import FIXTURE_INTEGRALS, as_evaluator, fixture


def design(f, n=11):
    xs = np.linspace(0.0, 1.0, n)
    return Dataset.from_1d(xs, [f(x) for x in xs])


def wiggle(x):
    return math.sin(6 * x) + x


class TestRegularizer:
    def test_unit_constant_field(self):
        spec = ProductKernelSpec.default(1, kind=FieldKind.CONSTANT, lengthscale=1.0)
        assert regularizer_value(Regularizer(), spec) == pytest.approx(31.0)

    def test_constant_field_of_two(self):
        spec = ProductKernelSpec.default(1, kind=FieldKind.CONSTANT, lengthscale=2.0)
        assert Regularizer(1.0, 1.0)(spec) == pytest.approx(2.5)

    def test_linear_field(self):
        field = LengthscaleField.from_values(FieldKind.PIECEWISE_LINEAR, [0.0, 1.0], [1.0, 2.0])
        spec = ProductKernelSpec(c=0.0, sigma=1.0, fields=(field,))
        reg = Regularizer(3.0, 5.0)
        assert reg(spec) == pytest.approx(1.5 * 3.0 + math.log(2) * 5.0, rel=1e-10)

    def test_product_over_axes(self):
        spec = ProductKernelSpec.default(2, kind=FieldKind.CONSTANT, lengthscale=2.0)
        assert Regularizer(1.0, 1.0)(spec) == pytest.approx(2.5**2)

    def test_stationary_penalty(self):
        spec = ProductKernelSpec.default(2, kind=FieldKind.CONSTANT, lengthscale=0.5)
        assert LinearLengthscalePenalty(2.0)(spec) == pytest.approx(2.0 * math.sqrt(2) * 1.0)
        assert LinearLengthscalePenalty()(spec) == 0.0

    def test_negative_weights(self):
        with pytest.raises(InvalidInputError):
            Regularizer(-1.0, 1.0)


class TestFitting:
    def test_fit_moves_the_mean_to_the_data(self):
        data = design(lambda x: 3.0 + 0.05 * math.sin(9 * x), n=8)
        init = ProductKernelSpec.default(1, kind=FieldKind.CONSTANT, c=0.0, lengthscale=0.2)
        outcome = EmpiricalBayesFitter(Regularizer(30.0, 1.0)).fit(data, init)
        assert outcome.objective >= outcome.init_objective
        assert abs(outcome.spec.c - 3.0) < 0.3
        assert outcome.spec.fields[0].kind == FieldKind.CONSTANT

    def test_heavier_length_penalty_gives_shorter_lengthscales(self):
        data = design(wiggle, n=8)
        init = ProductKernelSpec.default(1, kind=FieldKind.CONSTANT, c=float(np.mean(data.y)), lengthscale=0.2)
        light = fit_theta_eb(data, init, Regularizer(30.0, 1.0))
        heavy = fit_theta_eb(data, init, Regularizer(3000.0, 1.0))
        assert heavy.fields[0].integral() <= light.fields[0].integral() * (1 + 1e-6)

    def test_needs_data(self):
        with pytest.raises(InvalidInputError):
            fit_theta_eb(Dataset.empty(1), ProductKernelSpec.default(1), Regularizer())


class TestCandidates:
    def test_midpoints(self):
        data = Dataset.from_1d([1.0, 0.0, 0.5], [0.0, 0.0, 0.0])
        assert np.allclose(candidate_set_1d(data)[:, 0], [0.25, 0.75])

    def test_midpoints_need_one_dimension_and_two_points(self):
        with pytest.raises(InvalidInputError):
            candidate_set_1d(Dataset([[0.1, 0.2], [0.3, 0.4]], [0.0, 0.0]))
        with pytest.raises(InvalidInputError):
            candidate_set_1d(Dataset.from_1d([0.5], [0.0]))

    def test_grid_sample_skips_used_points(self, rng):
        U = [[0.0, 0.5, 1.0]]
        sample = candidate_set_grid(U, [[0.5]], 2, rng)
        assert sorted(sample[:, 0].tolist()) == [0.0, 1.0]
        assert candidate_set_grid(U, [], 0, rng).shape == (0, 1)
        with pytest.raises(InvalidInputError):
            candidate_set_grid(U, [[0.5]], 3, rng)

    def test_grid_sample_is_seeded(self):
        U = [np.linspace(0, 1, 6)] * 2
        first = candidate_set_grid(U, [], 5, np.random.default_rng(4))
        second = candidate_set_grid(U, [], 5, np.random.default_rng(4))
        assert np.array_equal(first, second)
        assert len({tuple(p) for p in first}) == 5

    def test_schedule(self):
        assert scheduled_count(500, 1) == 500
        assert scheduled_count(500, 10) == 491
        assert scheduled_count(500, 600) == 1

    def test_grid_candidates_cap_at_the_free_points(self, rng):
        source = GridCandidates([[0.0, 0.5, 1.0]], 500, rng)
        data = Dataset.from_1d([0.0, 1.0], [0.0, 0.0])
        assert source(data, 1).tolist() == [[0.5]]


class TestMetropolis:
    def test_recovers_a_gaussian(self):
        cov = np.array([[1.0, 0.5], [0.5, 1.0]])
        prec = np.linalg.inv(cov)
        mean = np.array([1.0, -2.0])

        def log_target(v):
            r = v - mean
            return -0.5 * float(r @ prec @ r)

        result = metropolis(log_target, mean, MCMCConfig(steps=101_000, burn_in=1000, thin=1, scale=1.0, seed=5))
        assert result.chain.shape == (100_000, 2)
        assert np.allclose(result.chain.mean(axis=0), mean, atol=0.05)
        assert np.allclose(np.cov(result.chain.T), cov, atol=0.1)

    def test_tiny_steps_are_almost_always_accepted(self):
        result = metropolis(lambda v: -0.5 * float(v @ v), np.zeros(3), MCMCConfig(steps=500, burn_in=0, scale=1e-6, seed=1))
        assert result.acceptance_rate > 0.99

    def test_seeded_chains_repeat(self):
        cfg = MCMCConfig(seed=11)
        target = lambda v: -float(np.sum(v**2))
        a = metropolis(target, [0.3, 0.1], cfg)
        b = metropolis(target, [0.3, 0.1], cfg)
        assert np.array_equal(a.chain, b.chain)
        assert a.chain.shape == (8, 2)

    def test_zero_uniform_draw_accepts(self):
        class ZeroDraws:
            def standard_normal(self, size):
                return np.ones(size)

            def uniform(self):
                return 0.0

            def exponential(self):
                return math.inf

        result = metropolis(lambda v: -0.5 * float(v @ v), np.zeros(2), MCMCConfig(steps=20, burn_in=0, seed=0), rng=ZeroDraws())
        assert result.acceptance_rate == 1.0
        assert np.all(np.isfinite(result.chain))

    def test_non_finite_start(self):
        with pytest.raises(InvalidInputError):
            metropolis(lambda v: -math.inf, [0.0], MCMCConfig(seed=0))

    def test_config_checks(self):
        with pytest.raises(InvalidInputError):
            MCMCConfig(steps=10, burn_in=10)
        with pytest.raises(InvalidInputError):
            MCMCConfig(thin=0)

    def test_scale_schedule(self):
        assert scale_schedule(0) == pytest.approx(0.3)
        assert scale_schedule(10) == pytest.approx(0.23)
        assert scale_schedule(100) == pytest.approx(0.01)


class TestTotalVariance:
    def test_examples(self):
        assert total_variance_estimate([1.0, 3.0], [0.5, 0.5]) == pytest.approx(1.5)
        assert total_variance_estimate([2.0], [0.7]) == pytest.approx(0.7)

    def test_needs_matching_draws(self):
        with pytest.raises(InvalidInputError):
            total_variance_estimate([], [])
        with pytest.raises(InvalidInputError):
            total_variance_estimate([1.0, 2.0], [1.0])

    def test_large_sample_limit(self, rng):
        means = rng.normal(2.0, 0.3, size=200_000)
        assert total_variance_estimate(means, np.full(means.size, 0.1)) == pytest.approx(0.19, abs=3e-3)


class TestStopRule:
    def test_needs_a_criterion(self):
        with pytest.raises(InvalidInputError):
            StopRule()
        with pytest.raises(InvalidInputError):
            StopRule(tau=0.0)

    def test_reasons(self):
        rule = StopRule(tau=0.01, budget=20)
        assert rule.reason(PosteriorIntegral(mu=0.0, sigma=0.005, n=5), 5) == StopReason.TOLERANCE
        assert rule.reason(PosteriorIntegral(mu=0.0, sigma=0.5, n=20), 20) == StopReason.BUDGET
        assert rule.reason(PosteriorIntegral(mu=0.0, sigma=0.5, n=19), 19) is None
        assert StopRule(tau=0.1).cap == 1000


class TestSettings:
    def test_initial_spec(self):
        data = Dataset.from_1d([0.0, 0.5, 1.0], [1.0, 2.0, 3.0])
        spec = BCSettings().initial_spec(data)
        assert spec.c == pytest.approx(2.0)
        assert spec.sigma == pytest.approx(np.std([1.0, 2.0, 3.0]))
        assert spec.fields[0].kind == FieldKind.PIECEWISE_LINEAR
        assert spec.fields[0](0.3) == pytest.approx(0.2)

    def test_constant_data_keeps_a_unit_scale(self):
        spec = BCSettings().initial_spec(Dataset.from_1d([0.2, 0.8], [4.0, 4.0]), FieldKind.CONSTANT)
        assert spec.sigma == 1.0
        assert spec.fields[0].kind == FieldKind.CONSTANT

    def test_unknown_overrides(self):
        with pytest.raises(InvalidInputError):
            BCSettings.from_config(colour="blue")
        assert BCSettings.from_config(K1=7).K1 == 7


class TestStdBC:
    def test_budget_counts_the_initial_design(self):
        trace = std_bc(wiggle, design(wiggle), StopRule(budget=20))
        assert trace.n_acquisitions == 9
        assert trace.stopped_by == StopReason.BUDGET
        assert trace.data.n == 20
        assert [r.n for r in trace.records] == list(range(1, 10))

    def test_constant_integrand(self):
        trace = std_bc(lambda x: 5.0, design(lambda x: 5.0, n=5), StopRule(budget=7))
        assert trace.final.mu == pytest.approx(5.0, abs=1e-4)

    def test_tolerance_stop_implies_small_sigma(self):
        stop = StopRule(tau=1e-3, budget=25)
        trace = std_bc(wiggle, design(wiggle), stop)
        if trace.stopped_by == StopReason.TOLERANCE:
            assert trace.final.sigma < 1e-3
        else:
            assert trace.stopped_by == StopReason.BUDGET
            assert trace.data.n == 25

    def test_acquired_points_are_new_midpoints(self):
        trace = run_bc(Method.STD_BC, wiggle, design(wiggle, n=5), StopRule(budget=8))
        points = trace.acquired_points()[:, 0]
        assert len(set(points.tolist())) == 3
        assert not np.isin(points, np.linspace(0.0, 1.0, 5)).any()

    def test_evaluation_failure_keeps_the_partial_trace(self):
        calls = {"n": 0}

        def flaky(x):
            calls["n"] += 1
            if calls["n"] == 3:
                raise RuntimeError("solver diverged")
            return wiggle(x)

        with pytest.raises(EvaluationError) as info:
            std_bc(flaky, design(wiggle), StopRule(budget=20))
        partial = info.value.partial_trace
        assert partial.n_acquisitions == 2
        assert partial.stopped_by is None

    def test_non_finite_value(self):
        with pytest.raises(EvaluationError):
            std_bc(lambda x: math.nan, design(wiggle, n=5), StopRule(budget=8))

    def test_multivariate_needs_a_grid(self):
        data = Dataset([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]], [0.0, 1.0, 0.0])
        with pytest.raises(InvalidInputError):
            std_bc(lambda x: float(x[0] * x[1]), data, StopRule(budget=5))

    def test_two_dimensional_grid_run(self):
        grid = [[0.0, 0.25, 0.5, 0.75, 1.0]] * 2
        corners = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
        data = Dataset(corners, [x * y for x, y in corners])
        trace = std_bc(lambda x: float(x[0] * x[1]), data, StopRule(budget=6), BCSettings(grid=grid, K1=10))
        assert trace.n_acquisitions == 2
        on_grid = np.isin(trace.acquired_points(), grid[0]).all()
        assert on_grid


class RightmostModel:
    """Fixed posterior; prefers the rightmost candidate."""

    def refresh(self, state):
        return {"current": PosteriorIntegral(mu=1.0, sigma=0.5, n=state["data"].n)}

    def scores(self, state, candidates):
        return -candidates[:, 0]

    def summarize(self, state, data):
        return PosteriorIntegral(mu=1.0, sigma=0.25, n=data.n)

    def finalize(self, state):
        return {"final": state["current"]}


class TestNodes:
    def test_nodes_drive_any_surrogate_model(self):
        model: SurrogateModel = RightmostModel()
        data = design(wiggle, n=5)
        fitted = FitNode(model).process({"data": data})
        assert fitted["current"].mu == 1.0 and fitted["aux_seconds"] >= 0.0
        acquired = AcquireNode(model, MidpointCandidates()).process({"data": data, "records": []})
        assert acquired["x_next"].tolist() == [0.875]
        finished = FinalizeNode(model, StopRule(budget=5)).process({"data": data, "current": fitted["current"], "records": []})
        assert finished["stopped_by"] == StopReason.BUDGET
        assert finished["final"] is fitted["current"]


class TestEAdapBC:
    def test_constant_integrand(self):
        trace = e_adap_bc(lambda x: 5.0, design(lambda x: 5.0, n=5), StopRule(budget=8))
        assert trace.n_acquisitions == 3
        for record in trace.records:
            assert record.mu == pytest.approx(5.0, abs=1e-4)
        assert trace.final.mu == pytest.approx(5.0, abs=1e-4)

    def test_constant_integrand_with_fixed_theta(self):
        theta = ProductKernelSpec.default(1, c=5.0, lengthscale=0.2)
        trace = e_adap_bc(lambda x: 5.0, design(lambda x: 5.0, n=5), StopRule(budget=10), BCSettings(theta=theta))
        sigmas = [r.sigma for r in trace.records]
        assert all(r.mu == pytest.approx(5.0, abs=1e-4) for r in trace.records)
        assert all(later <= earlier + 1e-9 for earlier, later in zip(sigmas, sigmas[1:]))

    def test_fixed_theta_acquisitions_ignore_the_values(self):
        theta = ProductKernelSpec.default(1, lengthscale=0.2)
        settings = BCSettings(theta=theta)
        steep = lambda x: 100.0 * wiggle(x) ** 2 - 3.0
        a = e_adap_bc(wiggle, design(wiggle, n=5), StopRule(budget=12), settings)
        b = e_adap_bc(steep, design(steep, n=5), StopRule(budget=12), settings)
        assert a.n_acquisitions == b.n_acquisitions == 7
        assert np.array_equal(a.acquired_points(), b.acquired_points())
        assert np.array_equal(a.spec.to_vector(), theta.to_vector())
        sigmas = [r.sigma for r in a.records]
        assert all(later <= earlier + 1e-9 for earlier, later in zip(sigmas, sigmas[1:]))

    def test_fixed_theta_must_match_the_dimension(self):
        settings = BCSettings(theta=ProductKernelSpec.default(2))
        with pytest.raises(InvalidInputError):
            e_adap_bc(wiggle, design(wiggle, n=5), StopRule(budget=8), settings)


class TestAdapBC:
    @pytest.fixture
    def settings(self):
        return BCSettings(
            field_kind=FieldKind.CONSTANT,
            burn_in=20,
            thin=1,
            M=2,
            K=2,
            J=3,
            double_method=DoubleIntegralMethod.GRID,
            grid_n=21,
            seed=3,
        )

    def test_tiny_full_bayes_run(self, settings):
        data = design(wiggle, n=5)
        trace = adap_bc(wiggle, data, StopRule(budget=7), settings)
        assert trace.n_acquisitions == 2
        assert trace.theta_samples.shape == (3, 3)
        assert trace.final.sigma >= 0

    def test_seeded_runs_repeat(self, settings):
        data = design(wiggle, n=5)
        a = adap_bc(wiggle, data, StopRule(budget=6), settings)
        b = adap_bc(wiggle, data, StopRule(budget=6), settings)
        assert a.to_dict() == b.to_dict()


@pytest.mark.slow
def test_nonstationary_run_on_the_illustration_integrand():
    params = fixture("illustration")
    f = as_evaluator(params)
    trace = e_adap_bc(f, design(f), StopRule(budget=20))
    assert trace.n_acquisitions == 9
    assert abs(trace.final.mu - FIXTURE_INTEGRALS["illustration"]) < 0.05
