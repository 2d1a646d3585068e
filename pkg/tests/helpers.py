"""Problem builders shared across the test modules."""

import numpy as np

from isaacslab.problem import (
    ActionSet,
    CoefficientSpec,
    PayoffSpec,
    PrioritySpec,
    ProblemSpec,
)

SQRT2 = float(np.sqrt(2.0))


def bilinear_problem(
    prio_family="constant",
    prio_params=(0.5,),
    horizon=0.5,
    kappa=4.0,
    s0=SQRT2,
    payoff=("cosine", (1.0, 1.0)),
):
    """The benchmark game: dX = kappa u v dt + s0 dW, U = V = {-1, 1}."""
    return ProblemSpec(
        coefficients=CoefficientSpec("bilinear", (kappa, s0), dim=1, noise_dim=1),
        payoff=PayoffSpec(payoff[0], payoff[1], dim=1),
        priority=PrioritySpec(prio_family, prio_params, dim=1),
        actions_u=ActionSet.from_values((-1.0, 1.0)),
        actions_v=ActionSet.from_values((-1.0, 1.0)),
        horizon=horizon,
    )


def singleton_problem(
    drift=0.0,
    sigma=SQRT2,
    payoff=("clipped_quadratic", (64.0,)),
    horizon=0.5,
    prio=0.5,
):
    """Uncontrolled linear dynamics: both players have a single action."""
    return ProblemSpec(
        coefficients=CoefficientSpec("constant", (drift, sigma), dim=1, noise_dim=1),
        payoff=PayoffSpec(payoff[0], payoff[1], dim=1),
        priority=PrioritySpec("constant", (prio,), dim=1),
        actions_u=ActionSet.from_values((0.0,)),
        actions_v=ActionSet.from_values((0.0,)),
        horizon=horizon,
    )
