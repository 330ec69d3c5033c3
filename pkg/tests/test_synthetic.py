import math

import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.special import expit

from adacube.exceptions import InvalidInputError
from adacube.synthetic import (
    FIXTURE_INTEGRALS,
    SyntheticParams,
    bump,
    eval_integrand,
    fixture,
    reference_integral,
    sample_many,
    sample_params,
)


class TestFixtures:
    @pytest.mark.parametrize("name", sorted(FIXTURE_INTEGRALS))
    def test_reference_values(self, name):
        assert reference_integral(fixture(name)) == pytest.approx(FIXTURE_INTEGRALS[name], abs=5e-4)

    def test_unknown_fixture(self):
        with pytest.raises(InvalidInputError):
            fixture("nope")


class TestIntegrand:
    def test_value_at_the_centres(self):
        p = SyntheticParams(C=[0.3, 0.6], R=[0.2, 0.1], H=[2.0, 1.5], F=[1.0, 3.0], P=[0, 1])
        assert eval_integrand(p, [0.3, 0.6]) == pytest.approx(3.0, rel=1e-12)

    def test_outside_the_bumps_only_the_steps_remain(self):
        p = SyntheticParams(C=[0.3, 0.6], R=[0.1, 0.1], H=[2.0, 1.5], F=[1.0, 3.0], P=[1, 1])
        x = np.array([0.8, 0.1])
        expected = np.prod(-(0.5 - expit(80.0 * (x - p.C))))
        assert eval_integrand(p, x) == pytest.approx(expected, rel=1e-12)

    def test_bump_support(self):
        z = np.array([-1.5, -1.0, 1.0, 2.0])
        assert np.all(bump(z, 2.0) == 0.0)
        assert bump(0.0, 4.2) == pytest.approx(1.0)
        assert np.all(bump(np.linspace(-0.99, 0.99, 50), 1.3) > 0)

    def test_shapes(self):
        one = SyntheticParams.one_dimensional(C=0.5, R=0.2, H=1.0, F=1.0, P=0)
        assert isinstance(eval_integrand(one, 0.3), float)
        assert eval_integrand(one, [0.1, 0.2, 0.3]).shape == (3,)
        two = SyntheticParams(C=[0.5, 0.5], R=[0.2, 0.2], H=[1.0, 1.0], F=[1.0, 1.0], P=[0, 0])
        assert isinstance(eval_integrand(two, [0.1, 0.2]), float)
        assert eval_integrand(two, np.full((4, 2), 0.25)).shape == (4,)
        with pytest.raises(InvalidInputError):
            eval_integrand(two, np.zeros((2, 3)))

    def test_parameter_checks(self):
        with pytest.raises(InvalidInputError):
            SyntheticParams(C=[0.5], R=[0.0], H=[1.0], F=[1.0], P=[0])
        with pytest.raises(InvalidInputError):
            SyntheticParams(C=[0.5, 0.4], R=[0.2], H=[1.0], F=[1.0], P=[0])

    def test_dict_replay(self):
        p = sample_params(3, np.random.default_rng(8), seed=8)
        again = SyntheticParams.from_dict(p.to_dict())
        assert np.array_equal(again.C, p.C) and np.array_equal(again.P, p.P)
        assert again.seed == 8


class TestSampling:
    def test_seeded_draws_repeat(self):
        a = sample_params(4, np.random.default_rng(12))
        b = sample_params(4, np.random.default_rng(12))
        assert np.array_equal(a.R, b.R) and np.array_equal(a.F, b.F)

    def test_laws(self):
        p = sample_params(10_000, np.random.default_rng(2))
        se = math.sqrt(10 / (49 * 8) / 10_000)
        assert abs(p.R.mean() - 5 / 7) <= 4 * se
        assert np.all((p.C > 0.1) & (p.C < 0.9))
        assert np.all((p.H > 0.5 * math.e) & (p.H < 1.5 * math.e))
        assert set(np.unique(p.P).tolist()) <= {0.0, 1.0}

    def test_ensembles_are_independent_of_their_size(self):
        short = sample_many(2, 3, seed=5)
        long = sample_many(2, 6, seed=5)
        assert all(np.array_equal(a.C, b.C) for a, b in zip(short, long))

    def test_bad_dimension(self):
        with pytest.raises(InvalidInputError):
            sample_params(0, np.random.default_rng(0))


def test_reference_integral_factorizes():
    """The tensor-product reference agrees with a fine two-dimensional Simpson sum."""
    p = SyntheticParams(C=[0.4, 0.65], R=[0.3, 0.25], H=[1.8, 2.2], F=[1.5, 0.7], P=[0, 1])
    g = np.linspace(0.0, 1.0, 2001)
    X, Y = np.meshgrid(g, g, indexing="ij")
    values = eval_integrand(p, np.column_stack([X.ravel(), Y.ravel()])).reshape(g.size, g.size)
    oracle = simpson(simpson(values, x=g, axis=1), x=g)
    assert reference_integral(p) == pytest.approx(oracle, abs=1e-6)
