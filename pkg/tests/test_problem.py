import dataclasses

import numpy as np
import pytest

from helpers import SQRT2, bilinear_problem, singleton_problem
from isaacslab.problem import (
    ActionSet,
    CoefficientSpec,
    PayoffSpec,
    PrioritySpec,
    ProblemError,
    coefficient_family_names,
    eval_coefficients,
    validate_assumptions,
)

seed = 0


def test_action_set_basics():
    acts = ActionSet.from_values((-1.0, 1.0))
    assert acts.size == 2
    assert acts.dim == 1
    assert acts.index_of(-1.0) == 0
    assert acts.index_of(1.0) == 1
    with pytest.raises(ProblemError):
        acts.index_of(0.5)


def test_action_set_rejects_bad_input():
    with pytest.raises(ProblemError):
        ActionSet.from_values(())
    with pytest.raises(ProblemError):
        ActionSet.from_values((1.0, 1.0))
    with pytest.raises(ProblemError):
        ActionSet.from_values((np.inf,))


def test_unknown_families_rejected():
    with pytest.raises(ProblemError):
        CoefficientSpec("cubic", (1.0,), dim=1, noise_dim=1)
    with pytest.raises(ProblemError):
        PayoffSpec("absolute", (1.0,), dim=1)
    with pytest.raises(ProblemError):
        PrioritySpec("step", (0.5,), dim=1)
    assert "bilinear" in coefficient_family_names()


def test_param_count_validation():
    with pytest.raises(ProblemError):
        CoefficientSpec("bilinear", (4.0,), dim=1, noise_dim=1)
    with pytest.raises(ProblemError):
        PayoffSpec("cosine", (1.0,), dim=1)


def test_bilinear_drift_and_diffusion():
    spec = bilinear_problem()
    b, sig = eval_coefficients(spec, 0.0, 0.0, 1.0, -1.0)
    assert b.shape == (1,)
    assert sig.shape == (1, 1)
    assert b[0] == -4.0
    assert sig[0, 0] == SQRT2


def test_bilinear_sign_flip_in_u():
    spec = bilinear_problem()
    b1, _ = eval_coefficients(spec, 0.1, 0.3, 1.0, 1.0)
    b2, _ = eval_coefficients(spec, 0.1, 0.3, -1.0, 1.0)
    assert b1[0] == -b2[0]


def test_bilinear_linear_growth_far_out():
    spec = bilinear_problem()
    worst = 0.0
    for x in np.linspace(-1e3, 1e3, 101):
        b, sig = eval_coefficients(spec, 0.0, x, 1.0, 1.0)
        worst = max(worst, (abs(b[0]) + abs(sig[0, 0])) / (1.0 + abs(x)))
    assert worst <= 6.0


def test_affine_drift_formula():
    coeff = CoefficientSpec("affine", (0.5, -2.0, 1.0), dim=1, noise_dim=1)
    X = np.array([[0.25]])
    U = V = np.zeros((1, 1))
    assert coeff.drift(0.0, X, U, V)[0, 0] == 0.5 - 2.0 * 0.25
    assert not coeff.state_independent


def test_state_independent_families_bitwise():
    spec = bilinear_problem()
    assert spec.coefficients.state_independent
    U = V = np.ones((1, 1))
    b1 = spec.drift(0.0, np.array([[0.0]]), U, V)
    b2 = spec.drift(0.0, np.array([[3.7]]), U, V)
    assert np.array_equal(b1, b2)


@pytest.mark.parametrize(
    "family,params",
    [
        ("constant", (0.3, 1.2)),
        ("affine", (0.1, -0.5, 0.8)),
        ("bilinear", (2.0, 1.0)),
    ],
)
def test_coefficient_shapes_and_finiteness(family, params):
    rng = np.random.default_rng(seed)
    coeff = CoefficientSpec(family, params, dim=1, noise_dim=1)
    X = rng.normal(0.0, 5.0, (64, 1))
    U = rng.choice([-1.0, 1.0], (64, 1))
    V = rng.choice([-1.0, 1.0], (64, 1))
    b = coeff.drift(0.25, X, U, V)
    sig = coeff.diffusion(0.25, X, U, V)
    assert b.shape == (64, 1)
    assert sig.shape == (64, 1, 1)
    assert np.all(np.isfinite(b))
    assert np.all(np.isfinite(sig))


def test_payoff_families():
    cos_g = PayoffSpec("cosine", (2.0, 3.0), dim=1)
    assert np.allclose(cos_g.value(np.array([[0.5]])), 2.0 * np.cos(1.5))
    assert cos_g.bound == 2.0
    quad = PayoffSpec("clipped_quadratic", (4.0,), dim=1)
    assert quad.value(np.array([[1.5]]))[0] == 2.25
    assert quad.value(np.array([[3.0]]))[0] == 4.0  # clip binds
    assert quad.bound == 4.0
    const = PayoffSpec("constant", (0.7,), dim=1)
    assert np.all(const.value(np.zeros((5, 1))) == 0.7)


def test_constant_priority_range_checked():
    with pytest.raises(ProblemError):
        PrioritySpec("constant", (1.7,), dim=1)
    with pytest.raises(ProblemError):
        PrioritySpec("constant", (-0.1,), dim=1)


def test_linear_time_priority():
    prio = PrioritySpec("linear_time", (0.3, 0.4), dim=1)
    assert prio.time_only
    assert prio.scalar(0.0) == 0.3
    assert prio.scalar(0.5) == 0.3 + 0.4 * 0.5
    bad = PrioritySpec("linear_time", (0.3, 2.0), dim=1)
    with pytest.raises(ProblemError):
        bad.value(0.9, np.zeros((1, 1)))  # 0.3 + 1.8 leaves [0, 1]


def test_logistic_priority_state_dependence():
    prio = PrioritySpec("logistic", (0.0, 0.0, 1.0), dim=1)
    assert not prio.time_only
    assert prio.scalar(0.0, 0.0) == 0.5
    with pytest.raises(ProblemError):
        prio.scalar(0.0)  # state required
    flat = PrioritySpec("logistic", (0.4, -0.2, 0.0), dim=1)
    assert flat.time_only


def test_logistic_priority_stays_in_unit_interval():
    rng = np.random.default_rng(seed)
    prio = PrioritySpec("logistic", (0.2, -0.1, 0.5), dim=1)
    for _ in range(20):
        vals = prio.value(rng.uniform(0, 1), rng.normal(0, 50, (500, 1)))
        assert vals.min() >= 0.0
        assert vals.max() <= 1.0


def test_problem_spec_validation():
    spec = bilinear_problem()
    assert spec.dim == 1
    assert spec.noise_dim == 1
    assert spec.start_state == (0.0,)
    with pytest.raises(ProblemError):
        bilinear_problem(horizon=-1.0)
    with pytest.raises(ProblemError):
        dataclasses.replace(spec, start_time=0.9)  # past the horizon
    with pytest.raises(ProblemError):
        dataclasses.replace(spec, start_state=(0.0, 0.0))


def test_eval_coefficients_domain_checks():
    spec = bilinear_problem()
    with pytest.raises(ProblemError):
        eval_coefficients(spec, 0.9, 0.0, 1.0, 1.0)  # t > T
    with pytest.raises(ProblemError):
        eval_coefficients(spec, 0.0, 0.0, 0.5, 1.0)  # u not in the grid


def test_validate_assumptions_benchmark():
    report = validate_assumptions(bilinear_problem(), box_radius=10.0, samples=2000, seed=seed)
    assert report.passed
    assert report.failures == ()
    assert report.growth_observed <= 6.0
    assert report.payoff_observed <= 1.0
    assert 0.0 <= report.priority_min <= report.priority_max <= 1.0


def test_validate_assumptions_constant_coefficients():
    report = validate_assumptions(singleton_problem(), samples=500, seed=seed)
    assert report.lipschitz_observed == 0.0
    assert report.passed
