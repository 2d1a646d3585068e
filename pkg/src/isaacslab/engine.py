"""Lattice games, backward induction, and Monte Carlo play.

The continuous dynamics are replaced by a controlled lattice chain: from
node x over interval [t_k, t_k+1] with actions (u, v), the state moves to
x + b dt + sigma sqrt(dt) zeta_q with Gauss-Hermite abscissas zeta_q and
weights w_q, matching the Gaussian one-step mean and variance exactly.
Off-lattice successors are evaluated by linear interpolation, which keeps
the backward operator monotone; queries beyond the grid clamp to the edge
value, the probabilistic counterpart of the solver's zero-slope boundary.

Each interval is a one-period matrix game on the continuation values.
Who moves second is decided per interval: by a 0/1 mark (deterministic
rule) or by a coin with P(heads) = p(t_k, x) (random rule); heads means v
sees u.  Backward induction therefore values each node at the lower value
(mark 1), the upper value (mark 0), or their p-blend (random rule), and
the maximizing/minimizing choices yield Markov strategy tables: a plain
action for leading and a counter map for responding.

Monte Carlo play re-runs the same rounds forward with Euler sub-steps and
frozen actions per interval, snapping states to the nearest node for
strategy lookup while keeping raw states for the dynamics.  Coins and
Gaussian increments come from separate seeded streams, and one coin per
interval is always consumed, so trajectories under different priorities
are driven by identical noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .pde import SpatialGrid, ValueField
from .problem import ProblemError, ProblemSpec
from .schedule import MarkSequence, Partition, ScheduleError, SubGrid

__all__ = [
    "EngineError",
    "GridTooCoarseError",
    "NoiseSource",
    "CoinSource",
    "TransitionModel",
    "build_lattice",
    "MarkovStrategyU",
    "MarkovStrategyV",
    "HashFeedbackStrategyU",
    "HashFeedbackStrategyV",
    "GameValueTables",
    "dp_value_random",
    "dp_value_deterministic",
    "DeterministicMode",
    "RandomMode",
    "PathRecord",
    "SimulationResult",
    "simulate",
    "ChallengerResult",
    "ExploitabilityReport",
    "exploitability",
    "random_markov_strategy",
    "perturbed_strategy",
]

QUAD_CHOICES = (3, 5, 7)


class EngineError(ValueError):
    """Invalid lattice, strategy, or simulation input."""


class GridTooCoarseError(EngineError):
    """One lattice step overshoots half the domain: the grid cannot carry the dynamics."""


# --- randomness ----------------------------------------------------------------


class NoiseSource:
    """Seeded stream of Gaussian increments for the Euler sub-steps.

    Draw order is fixed (one (paths, noise_dim) block per sub-step), so
    two runs with equal seeds and equal shapes see identical noise.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self.draws = 0

    def increments(self, paths: int, noise_dim: int, dt: float) -> np.ndarray:
        self.draws += paths * noise_dim
        return self._rng.normal(0.0, np.sqrt(dt), size=(paths, noise_dim))


class CoinSource:
    """Seeded stream of uniforms on [0, 1) deciding who moves second.

    Kept separate from the noise stream so that consuming coins never
    shifts the Gaussian draws; uniform draws compared against p are
    exactly as good as transformed normals for a Bernoulli(p) outcome.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self.draws = 0

    def uniforms(self, paths: int) -> np.ndarray:
        self.draws += paths
        return self._rng.random(paths)


# --- lattice -------------------------------------------------------------------


@dataclass(frozen=True)
class TransitionModel:
    """Gauss-Hermite successor positions for every (interval, node, u, v).

    ``successors`` has shape (intervals, nodes, ku, kv, q) and holds raw
    (unclamped) positions; interpolation clamps at query time.
    ``max_protrusion`` records how far any successor leaves the domain.
    """

    grid: SpatialGrid
    partition: Partition
    quad_nodes: np.ndarray
    quad_weights: np.ndarray
    successors: np.ndarray
    max_protrusion: float

    @property
    def quad_points(self) -> int:
        return self.quad_nodes.size

    def moment_errors(self, spec: ProblemSpec) -> tuple[float, float]:
        """Worst absolute error of lattice mean and variance vs b dt and sigma^2 dt."""
        xs = self.grid.xs
        n = xs.size
        w = self.quad_weights
        err_mean = 0.0
        err_var = 0.0
        for k in range(self.partition.intervals):
            t = float(self.partition.times[k])
            dt = float(self.partition.steps[k])
            for a in range(spec.actions_u.size):
                U = np.broadcast_to(spec.actions_u.array[a], (n, spec.actions_u.dim))
                for bidx in range(spec.actions_v.size):
                    V = np.broadcast_to(spec.actions_v.array[bidx], (n, spec.actions_v.dim))
                    b = spec.drift(t, xs[:, None], U, V)[:, 0]
                    sig = spec.diffusion(t, xs[:, None], U, V)[:, 0, :]
                    s2 = np.sum(sig * sig, axis=1)
                    succ = self.successors[k, :, a, bidx, :]
                    mean = succ @ w
                    var = ((succ - mean[:, None]) ** 2) @ w
                    err_mean = max(err_mean, float(np.max(np.abs(mean - (xs + b * dt)))))
                    err_var = max(err_var, float(np.max(np.abs(var - s2 * dt))))
        return err_mean, err_var


def _gauss_hermite_unit(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Abscissas and weights of a unit normal: q-point exactness up to degree 2q-1."""
    nodes, weights = hermgauss(q)
    return nodes * np.sqrt(2.0), weights / np.sqrt(np.pi)


def build_lattice(
    spec: ProblemSpec,
    grid: SpatialGrid,
    partition: Partition,
    quad_points: int = 3,
) -> TransitionModel:
    """Tabulate successor positions for all intervals, nodes and action pairs.

    The partition must end at the horizon (the terminal slice carries g)
    and start no earlier than time zero.  Raises
    :class:`GridTooCoarseError` when a single step can overshoot half the
    domain width: no amount of clamping makes such a lattice meaningful.
    """
    if spec.dim != 1:
        raise EngineError("the lattice engine handles state dimension 1")
    if quad_points not in QUAD_CHOICES:
        raise EngineError(f"quad_points must be one of {QUAD_CHOICES}")
    if partition.start < 0.0 or abs(partition.end - spec.horizon) > 1e-12:
        raise EngineError("partition must span [s, T] with s >= 0 and end at the horizon")
    zeta, w = _gauss_hermite_unit(quad_points)
    xs = grid.xs
    n = xs.size
    ku, kv = spec.actions_u.size, spec.actions_v.size
    succ = np.empty((partition.intervals, n, ku, kv, quad_points))
    for k in range(partition.intervals):
        t = float(partition.times[k])
        dt = float(partition.steps[k])
        for a in range(ku):
            U = np.broadcast_to(spec.actions_u.array[a], (n, spec.actions_u.dim))
            for bidx in range(kv):
                V = np.broadcast_to(spec.actions_v.array[bidx], (n, spec.actions_v.dim))
                b = spec.drift(t, xs[:, None], U, V)[:, 0]
                sig = spec.diffusion(t, xs[:, None], U, V)[:, 0, :]
                s_eff = np.sqrt(np.sum(sig * sig, axis=1))
                succ[k, :, a, bidx, :] = (
                    xs[:, None] + b[:, None] * dt + s_eff[:, None] * np.sqrt(dt) * zeta
                )
    protrusion = max(
        float(grid.lower - succ.min()), float(succ.max() - grid.upper), 0.0
    )
    if protrusion > 0.5 * (grid.upper - grid.lower):
        raise GridTooCoarseError(
            f"a lattice step leaves the domain by {protrusion:.3g}, more than half "
            f"the domain width; enlarge the domain or refine the partition"
        )
    return TransitionModel(
        grid=grid,
        partition=partition,
        quad_nodes=zeta,
        quad_weights=w,
        successors=succ,
        max_protrusion=protrusion,
    )


# --- strategies ------------------------------------------------------------------


class _MarkovTable:
    """Node-indexed action tables, piecewise constant over interval blocks.

    ``starts[r]`` is the first interval index where row r applies; rows
    apply until the next start.  ``plain`` is (rows, nodes) of own action
    indices for leading; ``counter`` is (rows, nodes, opponent actions)
    of own action indices for responding.
    """

    needs_history = False

    def __init__(self, grid: SpatialGrid, starts, plain, counter):
        starts = tuple(int(s) for s in starts)
        plain = np.asarray(plain, dtype=int)
        counter = np.asarray(counter, dtype=int)
        if not starts or starts[0] != 0 or any(
            b <= a for a, b in zip(starts, starts[1:])
        ):
            raise EngineError("strategy starts must begin at 0 and increase")
        if plain.ndim != 2 or counter.ndim != 3:
            raise EngineError("plain must be (rows, nodes), counter (rows, nodes, opp)")
        if plain.shape[0] != len(starts) or counter.shape[:2] != plain.shape:
            raise EngineError("strategy table shapes do not match the starts")
        if plain.shape[1] != grid.nodes:
            raise EngineError("strategy tables must have one column per grid node")
        if plain.min() < 0 or counter.min() < 0:
            raise EngineError("action indices must be non-negative")
        self.grid = grid
        self.starts = starts
        self.plain = plain
        self.counter = counter
        self._start_arr = np.asarray(starts, dtype=int)

    def _row(self, k: int) -> int:
        r = int(np.searchsorted(self._start_arr, k, side="right") - 1)
        if r < 0:
            raise EngineError(f"interval {k} precedes the first strategy row")
        return r

    def plain_actions(self, k: int, nodes: np.ndarray, history) -> np.ndarray:
        return self.plain[self._row(k), nodes]

    def counter_actions(
        self, k: int, nodes: np.ndarray, history, opp: np.ndarray
    ) -> np.ndarray:
        return self.counter[self._row(k), nodes, opp]


class MarkovStrategyU(_MarkovTable):
    """u's tables: plain action per node, counter map per (node, v-action)."""


class MarkovStrategyV(_MarkovTable):
    """v's tables: plain action per node, counter map per (node, u-action)."""


def _mix_hash(*arrays: np.ndarray) -> np.ndarray:
    """Deterministic integer mix of equal-length int arrays (splitmix-style)."""
    acc = np.zeros_like(arrays[0], dtype=np.uint64)
    for arr in arrays:
        acc = acc + arr.astype(np.uint64) + np.uint64(0x9E3779B97F4A7C15)
        acc = (acc ^ (acc >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        acc = (acc ^ (acc >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        acc = acc ^ (acc >> np.uint64(31))
    return acc


class _HashFeedback:
    """History-dependent challenger: a hash of (interval, node, last node, opponent).

    Deterministic given the seed; serves as an arbitrary feedback
    strategy that reacts to the discretized path, not only the current
    node.
    """

    needs_history = True

    def __init__(self, grid: SpatialGrid, n_actions: int, seed: int):
        if n_actions < 1:
            raise EngineError("need at least one action")
        self.grid = grid
        self.n_actions = int(n_actions)
        self.seed = int(seed)

    def _pick(self, k: int, nodes: np.ndarray, history, opp: np.ndarray | None) -> np.ndarray:
        last = history[-1] if history else np.zeros_like(nodes)
        parts = [
            np.full_like(nodes, self.seed),
            np.full_like(nodes, k),
            nodes,
            last,
        ]
        if opp is not None:
            parts.append(opp)
        return (_mix_hash(*[p.astype(np.int64) for p in parts]) % np.uint64(
            self.n_actions
        )).astype(int)

    def plain_actions(self, k: int, nodes: np.ndarray, history) -> np.ndarray:
        return self._pick(k, nodes, history, None)

    def counter_actions(
        self, k: int, nodes: np.ndarray, history, opp: np.ndarray
    ) -> np.ndarray:
        return self._pick(k, nodes, history, opp)


class HashFeedbackStrategyU(_HashFeedback):
    """Feedback challenger on u's side."""


class HashFeedbackStrategyV(_HashFeedback):
    """Feedback challenger on v's side."""


def random_markov_strategy(
    side: str,
    grid: SpatialGrid,
    partition: Partition,
    n_own: int,
    n_opp: int,
    seed: int,
):
    """Uniformly random per-interval Markov tables; a weak but fair challenger."""
    rng = np.random.default_rng(seed)
    rows = partition.intervals
    plain = rng.integers(0, n_own, size=(rows, grid.nodes))
    counter = rng.integers(0, n_own, size=(rows, grid.nodes, n_opp))
    cls = MarkovStrategyU if side == "u" else MarkovStrategyV
    return cls(grid, tuple(range(rows)), plain, counter)


def perturbed_strategy(base: _MarkovTable, flip_fraction: float, seed: int):
    """Re-randomize a fraction of a Markov table's entries: a local challenger."""
    if not 0.0 <= flip_fraction <= 1.0:
        raise EngineError("flip fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n_own = int(max(base.plain.max(), base.counter.max())) + 1
    plain = base.plain.copy()
    counter = base.counter.copy()
    mask_p = rng.random(plain.shape) < flip_fraction
    mask_c = rng.random(counter.shape) < flip_fraction
    plain[mask_p] = rng.integers(0, n_own, size=int(mask_p.sum()))
    counter[mask_c] = rng.integers(0, n_own, size=int(mask_c.sum()))
    return type(base)(base.grid, base.starts, plain, counter)


# --- backward induction -----------------------------------------------------------


@dataclass(frozen=True)
class GameValueTables:
    """Backward-induction output: value fields plus saddle strategy tables.

    The per-interval game has an exact saddle point (the prioritized
    one-period game's sup-inf and inf-sup coincide), so ``v_minus`` and
    ``v_plus`` are equal by construction; they are kept as a pair because
    the ordering ``v_minus <= v_plus`` is the invariant every run is
    audited against, and ``max_order_violation`` records the largest
    pointwise violation of lower <= upper seen in any local game.
    """

    mode: str
    grid: SpatialGrid
    partition: Partition
    v_minus: ValueField
    v_plus: ValueField
    strategy_u: MarkovStrategyU
    strategy_v: MarkovStrategyV
    max_order_violation: float

    @property
    def value(self) -> ValueField:
        return self.v_minus

    def value_at_start(self, x: float) -> float:
        return self.value.value_at(float(self.partition.times[0]), x)


def _dp_sweep(
    spec: ProblemSpec,
    lattice: TransitionModel,
    node_rule,
    strategy_starts: tuple[int, ...],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Shared backward loop.

    ``node_rule(k, lower, upper)`` returns the node values for interval k.
    Strategy rows are extracted at each index in ``strategy_starts`` from
    that interval's local games.
    """
    grid = lattice.grid
    partition = lattice.partition
    xs = grid.xs
    n = partition.intervals
    ku, kv = spec.actions_u.size, spec.actions_v.size
    values = np.empty((n + 1, grid.nodes))
    values[n] = spec.payoff_values(xs[:, None])
    rows = len(strategy_starts)
    u_plain = np.zeros((rows, grid.nodes), dtype=int)
    u_counter = np.zeros((rows, grid.nodes, kv), dtype=int)
    v_plain = np.zeros((rows, grid.nodes), dtype=int)
    v_counter = np.zeros((rows, grid.nodes, ku), dtype=int)
    start_lookup = {k: r for r, k in enumerate(strategy_starts)}
    worst = 0.0
    w = lattice.quad_weights
    for k in range(n - 1, -1, -1):
        succ = lattice.successors[k]
        contin = np.interp(succ.ravel(), xs, values[k + 1]).reshape(succ.shape)
        f = contin @ w
        row_floor = f.min(axis=2)
        lower = row_floor.max(axis=1)
        col_ceil = f.max(axis=1)
        upper = col_ceil.min(axis=1)
        worst = max(worst, float(np.max(lower - upper)))
        values[k] = node_rule(k, lower, upper)
        r = start_lookup.get(k)
        if r is not None:
            u_plain[r] = row_floor.argmax(axis=1)
            u_counter[r] = f.argmax(axis=1)
            v_plain[r] = col_ceil.argmin(axis=1)
            v_counter[r] = f.argmin(axis=2)
    return values, u_plain, u_counter, v_plain, v_counter, worst


def _tables(
    mode: str,
    spec: ProblemSpec,
    lattice: TransitionModel,
    node_rule,
    starts: tuple[int, ...],
) -> GameValueTables:
    values, u_plain, u_counter, v_plain, v_counter, worst = _dp_sweep(
        spec, lattice, node_rule, starts
    )
    fld = ValueField(grid=lattice.grid, times=lattice.partition.times, values=values)
    return GameValueTables(
        mode=mode,
        grid=lattice.grid,
        partition=lattice.partition,
        v_minus=fld,
        v_plus=ValueField(
            grid=lattice.grid, times=lattice.partition.times, values=values.copy()
        ),
        strategy_u=MarkovStrategyU(lattice.grid, starts, u_plain, u_counter),
        strategy_v=MarkovStrategyV(lattice.grid, starts, v_plain, v_counter),
        max_order_violation=worst,
    )


def dp_value_random(
    spec: ProblemSpec, partition: Partition, lattice: TransitionModel
) -> GameValueTables:
    """Backward induction under the coin rule.

    Each node of each interval is valued at p(t_k, x) times the lower
    value plus (1 - p) times the upper value of the local game on the
    continuation; degenerate p reproduces the one-sided branch bitwise.
    Strategies are extracted at every interval.
    """
    _check_lattice(partition, lattice)
    xs = lattice.grid.xs[:, None]

    def node_rule(k: int, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
        p = spec.priority_values(float(partition.times[k]), xs)
        blend = p * lower + (1.0 - p) * upper
        return np.where(p == 1.0, lower, np.where(p == 0.0, upper, blend))

    starts = tuple(range(partition.intervals))
    return _tables("random", spec, lattice, node_rule, starts)


def dp_value_deterministic(
    spec: ProblemSpec,
    partition: Partition,
    marks: MarkSequence,
    subgrid: SubGrid,
    lattice: TransitionModel,
) -> GameValueTables:
    """Backward induction under a fixed mark sequence.

    Interval k is valued at the lower value when its mark is 1 (v sees u)
    and at the upper value when 0; no blending is involved.  Strategy rows
    are extracted once per sub-grid block, at the block's first interval,
    so actions persist across the block as the marks flip inside it.
    Requires a time-only priority, the regime the mark density refers to.
    """
    _check_lattice(partition, lattice)
    if not spec.priority.time_only:
        raise ScheduleError("deterministic marks need a time-only priority")
    if len(marks) != partition.intervals:
        raise ScheduleError("need one mark per partition interval")
    if subgrid.indices[-1] != partition.intervals:
        raise ScheduleError("sub-grid must end at the last partition index")
    xi = marks.array

    def node_rule(k: int, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
        return lower if xi[k] == 1 else upper

    starts = subgrid.indices[:-1]
    return _tables("deterministic", spec, lattice, node_rule, starts)


def _check_lattice(partition: Partition, lattice: TransitionModel) -> None:
    if lattice.partition.times.shape != partition.times.shape or not np.array_equal(
        lattice.partition.times, partition.times
    ):
        raise EngineError("lattice was built for a different partition")


# --- forward simulation -------------------------------------------------------------


@dataclass(frozen=True)
class DeterministicMode:
    """Play under a fixed mark sequence."""

    marks: MarkSequence


@dataclass(frozen=True)
class RandomMode:
    """Play under per-interval coins from a dedicated source."""

    coins: CoinSource


@dataclass(frozen=True)
class PathRecord:
    """Full audit trail of one simulated path.

    ``states`` holds the decision-time states, ``substep_states`` every
    Euler point, and ``noise`` the Gaussian increments, so the recursion
    X_next = X + b dt + sigma dW can be replayed exactly.
    ``who_second[k]`` is True when v saw u in interval k.
    """

    times: np.ndarray
    states: np.ndarray
    substep_states: np.ndarray
    u_actions: np.ndarray
    v_actions: np.ndarray
    coins: np.ndarray
    who_second: np.ndarray
    noise: np.ndarray
    payoff: float


@dataclass(frozen=True)
class SimulationResult:
    """Monte Carlo estimate of the expected terminal payoff."""

    mean: float
    std_error: float
    paths: int
    payoffs: np.ndarray
    records: tuple[PathRecord, ...] = field(default=())


def simulate(
    spec: ProblemSpec,
    partition: Partition,
    mode: DeterministicMode | RandomMode,
    strat_u,
    strat_v,
    paths: int,
    substeps: int,
    noise: NoiseSource,
    record: int = 0,
) -> SimulationResult:
    """Play the discretized game forward and average the terminal payoff.

    Per interval: snap states to the nearest node, settle who moves
    second (mark or coin; a coin is drawn every interval regardless of
    the priority value), let the second mover's counter map answer the
    leader's plain action, then freeze both actions and take Euler
    sub-steps.  The first ``record`` paths keep a full audit trail.
    """
    if spec.dim != 1:
        raise EngineError("the simulator handles state dimension 1")
    if paths < 1 or substeps < 1:
        raise EngineError("need at least one path and one sub-step")
    if not 0 <= record <= paths:
        raise EngineError("record count must lie in [0, paths]")
    grid = strat_u.grid
    if strat_v.grid is not grid and (
        strat_v.grid.lower != grid.lower
        or strat_v.grid.upper != grid.upper
        or strat_v.grid.nodes != grid.nodes
    ):
        raise EngineError("both strategies must share one lookup grid")
    if isinstance(mode, DeterministicMode):
        if not spec.priority.time_only:
            raise ScheduleError("deterministic marks need a time-only priority")
        if len(mode.marks) != partition.intervals:
            raise ScheduleError("need one mark per partition interval")
        xi = mode.marks.array
    elif isinstance(mode, RandomMode):
        xi = None
    else:
        raise EngineError("mode must be DeterministicMode or RandomMode")

    n = partition.intervals
    d_prime = spec.noise_dim
    x = np.full(paths, spec.start_state[0], dtype=float)
    history: list[np.ndarray] = []
    rec = record
    if rec:
        rec_states = np.empty((n + 1, rec))
        rec_states[0] = x[:rec]
        rec_sub = np.empty((n * substeps + 1, rec))
        rec_sub[0] = x[:rec]
        rec_u = np.empty((n, rec), dtype=int)
        rec_v = np.empty((n, rec), dtype=int)
        rec_coins = np.full((n, rec), np.nan)
        rec_second = np.empty((n, rec), dtype=bool)
        rec_noise = np.empty((n, substeps, rec, d_prime))

    for k in range(n):
        t_prev = float(partition.times[k])
        dt = float(partition.steps[k])
        nodes = grid.nearest_index(x)
        if xi is None:
            coins = mode.coins.uniforms(paths)
            p = spec.priority_values(t_prev, x[:, None])
            heads = coins < p
        else:
            heads = np.full(paths, bool(xi[k]))
            coins = None
        u_plain = strat_u.plain_actions(k, nodes, history)
        v_plain = strat_v.plain_actions(k, nodes, history)
        v_resp = strat_v.counter_actions(k, nodes, history, u_plain)
        u_resp = strat_u.counter_actions(k, nodes, history, v_plain)
        iu = np.where(heads, u_plain, u_resp)
        iv = np.where(heads, v_resp, v_plain)
        U = spec.actions_u.array[iu]
        V = spec.actions_v.array[iv]
        dt_sub = dt / substeps
        for ss in range(substeps):
            t_sub = t_prev + ss * dt_sub
            b = spec.drift(t_sub, x[:, None], U, V)[:, 0]
            sig = spec.diffusion(t_sub, x[:, None], U, V)[:, 0, :]
            dW = noise.increments(paths, d_prime, dt_sub)
            x = x + b * dt_sub + np.sum(sig * dW, axis=1)
            if rec:
                rec_sub[k * substeps + ss + 1] = x[:rec]
                rec_noise[k, ss] = dW[:rec]
        history.append(nodes)
        if rec:
            rec_states[k + 1] = x[:rec]
            rec_u[k] = iu[:rec]
            rec_v[k] = iv[:rec]
            if coins is not None:
                rec_coins[k] = coins[:rec]
            rec_second[k] = heads[:rec]

    payoffs = spec.payoff_values(x[:, None])
    mean = float(payoffs.mean())
    se = float(payoffs.std(ddof=1) / np.sqrt(paths)) if paths > 1 else float("inf")
    records = []
    for i in range(rec):
        records.append(
            PathRecord(
                times=partition.times.copy(),
                states=rec_states[:, i].copy(),
                substep_states=rec_sub[:, i].copy(),
                u_actions=rec_u[:, i].copy(),
                v_actions=rec_v[:, i].copy(),
                coins=rec_coins[:, i].copy(),
                who_second=rec_second[:, i].copy(),
                noise=rec_noise[:, :, i, :].copy(),
                payoff=float(payoffs[i]),
            )
        )
    return SimulationResult(
        mean=mean, std_error=se, paths=paths, payoffs=payoffs, records=tuple(records)
    )


# --- exploitability ------------------------------------------------------------------


@dataclass(frozen=True)
class ChallengerResult:
    label: str
    mean: float
    std_error: float


@dataclass(frozen=True)
class ExploitabilityReport:
    """Payoffs a roster of challengers extracts against one frozen strategy.

    ``worst`` is the challenger most damaging to the frozen side: the
    minimum mean when u is frozen (v challengers push the payoff down),
    the maximum when v is frozen.
    """

    fixed_side: str
    results: tuple[ChallengerResult, ...]

    @property
    def worst(self) -> ChallengerResult:
        if self.fixed_side == "u":
            return min(self.results, key=lambda r: r.mean)
        return max(self.results, key=lambda r: r.mean)


def exploitability(
    spec: ProblemSpec,
    partition: Partition,
    mode_kind: str,
    fixed_side: str,
    strategy,
    challengers: int,
    seed: int,
    *,
    tables: GameValueTables,
    marks: MarkSequence | None = None,
    paths: int = 20000,
    substeps: int = 4,
) -> ExploitabilityReport:
    """Measure how far seeded challengers move the payoff against a frozen strategy.

    The roster: the backward-induction saddle strategy of the opposing
    side, locally perturbed copies of it, uniformly random Markov tables,
    and hash feedback strategies, all seeded from ``seed``.  Every
    challenger faces fresh coins and noise (seeds derived from its index)
    over the same number of paths.
    """
    if fixed_side not in ("u", "v"):
        raise EngineError("fixed_side must be 'u' or 'v'")
    if mode_kind not in ("random", "deterministic"):
        raise EngineError("mode_kind must be 'random' or 'deterministic'")
    if mode_kind == "deterministic" and marks is None:
        raise EngineError("deterministic mode needs the mark sequence")
    if challengers < 1:
        raise EngineError("need at least one challenger")
    grid = tables.grid
    opp_side = "v" if fixed_side == "u" else "u"
    n_own = spec.actions_v.size if opp_side == "v" else spec.actions_u.size
    n_opp = spec.actions_u.size if opp_side == "v" else spec.actions_v.size
    dp_opp = tables.strategy_v if opp_side == "v" else tables.strategy_u

    roster = [("dp_best_response", dp_opp)]
    n_rest = challengers - 1
    n_perturbed = n_rest // 3
    n_feedback = n_rest // 3
    n_random = n_rest - n_perturbed - n_feedback
    for i in range(n_perturbed):
        roster.append(
            (f"perturbed_{i}", perturbed_strategy(dp_opp, 0.15, seed * 1000 + i))
        )
    for i in range(n_feedback):
        cls = HashFeedbackStrategyV if opp_side == "v" else HashFeedbackStrategyU
        roster.append((f"feedback_{i}", cls(grid, n_own, seed * 2000 + i)))
    for i in range(n_random):
        roster.append(
            (
                f"random_markov_{i}",
                random_markov_strategy(
                    opp_side, grid, partition, n_own, n_opp, seed * 3000 + i
                ),
            )
        )

    results = []
    for idx, (label, challenger) in enumerate(roster):
        if mode_kind == "random":
            mode = RandomMode(CoinSource(seed * 7000 + idx))
        else:
            mode = DeterministicMode(marks)
        noise = NoiseSource(seed * 9000 + idx)
        if fixed_side == "u":
            res = simulate(
                spec, partition, mode, strategy, challenger, paths, substeps, noise
            )
        else:
            res = simulate(
                spec, partition, mode, challenger, strategy, paths, substeps, noise
            )
        results.append(ChallengerResult(label=label, mean=res.mean, std_error=res.std_error))
    return ExploitabilityReport(fixed_side=fixed_side, results=tuple(results))
