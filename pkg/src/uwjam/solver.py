"""Multistage game solver.

The state of the energy-depleting jamming game is the battery pair
(b_t, b_j) in packet quanta. Every frame the transmitter spends n_t and
the jammer spends n_j quanta; the game ends when the transmitter can no
longer afford a minimal frame (b_t < k). Both players observe both
batteries, so each state hosts a finite zero-sum matrix game whose
entries are the frame payoff plus the discounted continuation value.

Values are computed by backward induction over b_t (every action
strictly decreases it), with a rolling receding horizon: the strategy
deployed at a state is the equilibrium of the matrix whose continuation
values look gamma = horizon frames ahead. Since the game cannot outlast
floor(b_t / k) further frames, horizon values are constant in gamma past
that depth, which caps the work per state.

Matrix games are solved as linear programs with a dense tableau simplex,
batched over states: value = 1/max(1'q) with (M + shift) q <= 1, q >= 0.
Entering variables follow Bland's rule and the ratio test runs on a
deterministically perturbed right-hand side carried next to the true
one, so degenerate matrices (common when a PER saturates at 0 or 1)
cannot cycle. Identical inputs take identical pivot paths, which makes
solves reproducible bit for bit.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, TableError
from .subgame import SubgameParams, payoff_matrix, success_matrix

__all__ = [
    "GameState",
    "EPSILON",
    "GameConfig",
    "MixedStrategy",
    "StrategyTable",
    "is_terminal",
    "action_sets",
    "transition_distribution",
    "build_payoff_matrix",
    "solve_matrix_game",
    "solve_full_game",
    "solve_vs_fixed_jammer",
    "dummy_jammer_policy",
    "fixed_policy_table",
    "deployed_matrix",
    "export_table",
    "load_table",
]

TABLE_FORMAT = "uwjam-strategy-table"
TABLE_VERSION = 1


class _EpsilonState:
    """Aggregated ending state: the transmitter cannot play a frame."""

    __slots__ = ()

    def __repr__(self):
        return "EPSILON"


EPSILON = _EpsilonState()


@dataclass(frozen=True, order=True)
class GameState:
    """Battery pair (transmitter, jammer) in packet quanta."""

    b_t: int
    b_j: int

    def __post_init__(self):
        if self.b_t < 0 or self.b_j < 0:
            raise ValueError("battery levels must be nonnegative")


def is_terminal(state, k):
    """True when no further frame can be played from this state."""
    return state is EPSILON or state.b_t < k


@dataclass(frozen=True)
class GameConfig:
    """Full specification of one game instance.

    :param k: packets needed per frame; frames have 2k slots
    :param b_t0: initial transmitter battery, quanta
    :param b_j0: initial jammer battery, quanta
    :param alpha: energy weight of the frame payoff
    :param p_clear: PER of an unjammed packet
    :param p_blocked: PER of a jammed packet
    :param horizon: lookahead depth gamma in frames; math.inf allowed
        when discount < 1
    :param discount: per-frame discount factor lambda in [0, 1]
    """

    k: int
    b_t0: int
    b_j0: int
    alpha: float
    p_clear: float
    p_blocked: float
    horizon: float = 30
    discount: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be a positive integer")
        if self.b_t0 < 0 or self.b_j0 < 0:
            raise ConfigError("initial batteries must be nonnegative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must lie in [0, 1]")
        for name in ("p_clear", "p_blocked"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.discount <= 1.0:
            raise ConfigError("discount must lie in [0, 1]")
        if math.isinf(self.horizon):
            if self.discount >= 1.0:
                raise ConfigError("infinite horizon requires discount < 1")
        elif self.horizon != int(self.horizon) or self.horizon < 1:
            raise ConfigError("horizon must be a positive integer or inf")

    @property
    def subgame(self):
        return SubgameParams(k=self.k, alpha=self.alpha,
                             p_clear=self.p_clear, p_blocked=self.p_blocked)

    @property
    def initial_state(self):
        return GameState(self.b_t0, self.b_j0)

    def effective_horizon(self):
        """Stored lookahead depth: values are gamma-stationary once gamma
        exceeds the maximum number of frames the game can still last."""
        depth = self.b_t0 // self.k
        if math.isinf(self.horizon):
            return depth
        return min(int(self.horizon), depth)

    def to_dict(self):
        return {
            "k": self.k,
            "b_t0": self.b_t0,
            "b_j0": self.b_j0,
            "alpha": self.alpha,
            "p_clear": self.p_clear,
            "p_blocked": self.p_blocked,
            "horizon": "inf" if math.isinf(self.horizon) else int(self.horizon),
            "discount": self.discount,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        horizon = data.get("horizon", 30)
        if horizon == "inf":
            horizon = math.inf
        data["horizon"] = horizon
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"bad game config: {exc}") from None


@dataclass(frozen=True)
class MixedStrategy:
    """Probability distribution over a player's frame actions.

    support holds the action values (packet or jam counts), probs the
    matching probabilities.
    """

    support: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.support) != len(self.probs) or not self.support:
            raise ValueError("support and probs must be nonempty and match")
        if any(p < 0.0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")

    def sample(self, rng):
        """Draw one action with the given numpy Generator."""
        u = rng.random()
        acc = 0.0
        for action, p in zip(self.support, self.probs):
            acc += p
            if u < acc:
                return action
        return self.support[-1]

    def prob_of(self, action):
        for a, p in zip(self.support, self.probs):
            if a == action:
                return p
        return 0.0


def action_sets(state, k):
    """Legal (transmitter, jammer) actions at a state.

    The transmitter sends k to min(2k, b_t) packets; the jammer hits 0 to
    min(2k - 1, b_j) of the 2k - 1 reachable slots. Not jamming is always
    legal, so the jammer set is never empty.
    """
    if is_terminal(state, k):
        raise ValueError("terminal state has no actions")
    n_ts = list(range(k, min(2 * k, state.b_t) + 1))
    n_js = list(range(0, min(2 * k - 1, state.b_j) + 1))
    return n_ts, n_js


def _successor(state, n_t, n_j, k):
    b_t = state.b_t - n_t
    b_j = state.b_j - n_j
    if b_t < k:
        return EPSILON
    return GameState(b_t, b_j)


def transition_distribution(state, t_action, j_action, k):
    """Distribution over successor states for given actions.

    Each argument may be a plain action or a :class:`MixedStrategy`;
    mixed inputs produce the product distribution. Successors the
    transmitter cannot play from are aggregated into EPSILON.
    """
    n_ts, n_js = action_sets(state, k)
    t_items = (t_action.items() if isinstance(t_action, dict)
               else list(zip(t_action.support, t_action.probs))
               if isinstance(t_action, MixedStrategy) else [(t_action, 1.0)])
    j_items = (list(zip(j_action.support, j_action.probs))
               if isinstance(j_action, MixedStrategy) else [(j_action, 1.0)])
    for n_t, _ in t_items:
        if n_t not in n_ts:
            raise ValueError(f"illegal transmitter action {n_t} at {state}")
    for n_j, _ in j_items:
        if n_j not in n_js:
            raise ValueError(f"illegal jammer action {n_j} at {state}")
    out = {}
    for n_t, pt in t_items:
        for n_j, pj in j_items:
            pr = pt * pj
            if pr == 0.0:
                continue
            nxt = _successor(state, n_t, n_j, k)
            out[nxt] = out.get(nxt, 0.0) + pr
    return out


def build_payoff_matrix(state, config, continuation=None):
    """Stage matrix at a state: frame payoff plus discounted continuation.

    :param continuation: callable mapping successor GameState (or
        EPSILON) to its value; None means a one-shot frame
    :returns: matrix of shape (len n_ts, len n_js), transmitter maximizes
    """
    n_ts, n_js = action_sets(state, config.k)
    base = payoff_matrix(config.subgame)
    mat = np.array(base[: len(n_ts), : len(n_js)])
    if continuation is not None:
        for i, n_t in enumerate(n_ts):
            for j, n_j in enumerate(n_js):
                nxt = _successor(state, n_t, n_j, config.k)
                v = 0.0 if nxt is EPSILON else continuation(nxt)
                mat[i, j] += config.discount * v
    return mat


# ---------------------------------------------------------------------------
# batched matrix-game LP


_SIMPLEX_TOL = 1e-12
_SIMPLEX_MAX_ITER = 5000


def _minimax_batch(matrices):
    """Solve a batch of zero-sum matrix games.

    :param matrices: array (B, m, n); row player maximizes
    :returns: (values (B,), row_strats (B, m), col_strats (B, n))

    The LP per instance is max 1'q s.t. (M + shift) q <= 1, q >= 0 with
    shift = 1 - min(M), so the shifted matrix is >= 1 and the optimum is
    bounded. The column strategy is q scaled by the objective, the row
    strategy comes from the slack reduced costs (the LP duals), and
    value = 1/objective - shift.
    """
    M = np.ascontiguousarray(matrices, dtype=float)
    batch, m, n = M.shape
    shift = 1.0 - M.min(axis=(1, 2))
    nv = n + m
    # tableau: [A | I | b_true | b_perturbed]; the perturbed column only
    # drives the ratio test, breaking degenerate ties deterministically
    D = np.empty((batch, m, nv + 2))
    D[:, :, :n] = M + shift[:, None, None]
    D[:, :, n:nv] = np.eye(m)
    D[:, :, nv] = 1.0
    D[:, :, nv + 1] = 1.0 + np.arange(1, m + 1) * 1e-7
    z = np.zeros((batch, nv + 1))
    z[:, :n] = 1.0
    basis = np.tile(np.arange(n, n + m), (batch, 1))
    active = np.arange(batch)
    it = 0
    while active.size:
        it += 1
        if it > _SIMPLEX_MAX_ITER:
            raise RuntimeError(f"matrix-game simplex stalled on {active.size} instances")
        can = z[active][:, :nv] > _SIMPLEX_TOL
        improving = can.any(axis=1)
        active = active[improving]
        if not active.size:
            break
        a = active
        can = z[a][:, :nv] > _SIMPLEX_TOL
        j = can.argmax(axis=1)                      # Bland: lowest improving index
        col = D[a, :, j]
        rhs = D[a, :, nv + 1]
        pos = col > _SIMPLEX_TOL
        ratio = np.where(pos, rhs / np.where(pos, col, 1.0), np.inf)
        rmin = ratio.min(axis=1)
        tie = pos & (ratio <= rmin[:, None] * (1.0 + 1e-12))
        key = np.where(tie, basis[a], np.iinfo(np.int64).max)
        i = key.argmin(axis=1)                      # lowest basis var among ties
        piv = D[a, i, :] / D[a, i, j][:, None]
        enter_col = D[a, :, j].copy()
        updated = D[a] - enter_col[:, :, None] * piv[:, None, :]
        updated[np.arange(a.size), i, :] = piv
        D[a] = updated
        z[a] = z[a] - z[a, j][:, None] * piv[:, : nv + 1]
        basis[a, i] = j
    q = np.zeros((batch, nv))
    q[np.arange(batch)[:, None], basis] = np.clip(D[:, :, nv], 0.0, None)
    objective = -z[:, nv]
    values = 1.0 / objective - shift
    col_strats = q[:, :n] / objective[:, None]
    row_strats = np.clip(-z[:, n:nv], 0.0, None) / objective[:, None]
    return values, row_strats, col_strats


def solve_matrix_game(matrix):
    """Equilibrium of one zero-sum matrix game (row player maximizes).

    :returns: (value, row_strategy, col_strategy) with strategies as
        probability arrays over the rows and columns

    Neither player can gain more than ~1e-9 by a pure deviation; ties
    between equilibria resolve deterministically through the fixed
    pivoting rule, so repeated calls return identical arrays.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError("payoff matrix must be 2-D and nonempty")
    values, rows, cols = _minimax_batch(matrix[None])
    return float(values[0]), rows[0], cols[0]


# ---------------------------------------------------------------------------
# strategy tables


class StrategyTable:
    """Solved game: per-state equilibrium strategies and values.

    Strategies are stored densely: t_probs[b_t, b_j, i] is the chance of
    sending n_t = k + i, j_probs[b_t, b_j, j] of jamming n_j = j slots.
    Rows for terminal b_t are all zero. horizon_values[g, b_t, b_j] holds
    the g-frame lookahead value (g = 0 is identically 0); it is None on
    tables loaded from disk, which only carry deployed strategies.
    """

    def __init__(self, config, t_probs, j_probs, values, horizon_values=None, meta=None):
        self.config = config
        self.t_probs = t_probs
        self.j_probs = j_probs
        self.values = values
        self.horizon_values = horizon_values
        self.meta = meta
        self._caches = {}

    def states(self):
        """All non-terminal states, ascending in (b_t, b_j)."""
        for b_t in range(self.config.k, self.config.b_t0 + 1):
            for b_j in range(self.config.b_j0 + 1):
                yield GameState(b_t, b_j)

    @property
    def n_states(self):
        playable = self.config.b_t0 - self.config.k + 1
        return max(0, playable) * (self.config.b_j0 + 1)

    def _check(self, state):
        if is_terminal(state, self.config.k):
            raise ValueError(f"{state} is terminal, no entry stored")
        if state.b_t > self.config.b_t0 or state.b_j > self.config.b_j0:
            raise ValueError(f"{state} outside the solved battery grid")

    def strategy_t(self, state):
        self._check(state)
        n_ts, _ = action_sets(state, self.config.k)
        probs = self.t_probs[state.b_t, state.b_j, : len(n_ts)]
        return MixedStrategy(tuple(n_ts), tuple(float(p) for p in probs))

    def strategy_j(self, state):
        self._check(state)
        _, n_js = action_sets(state, self.config.k)
        probs = self.j_probs[state.b_t, state.b_j, : len(n_js)]
        return MixedStrategy(tuple(n_js), tuple(float(p) for p in probs))

    def value(self, state):
        """Deployed (receding-horizon) value of a state; 0 at terminals."""
        if is_terminal(state, self.config.k):
            return 0.0
        self._check(state)
        return float(self.values[state.b_t, state.b_j])

    def horizon_value(self, state, gamma):
        """Value with an explicit lookahead of gamma frames."""
        if self.horizon_values is None:
            raise TableError("horizon values are not stored in exported tables")
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if is_terminal(state, self.config.k):
            return 0.0
        self._check(state)
        g = min(int(gamma), self.horizon_values.shape[0] - 1)
        return float(self.horizon_values[g, state.b_t, state.b_j])

    def deployed_depth(self, state):
        """Lookahead depth whose matrix the deployed strategy solves."""
        self._check(state)
        return min(self.config.effective_horizon(), state.b_t // self.config.k)


def deployed_matrix(table, state):
    """Stage matrix whose equilibrium is the strategy deployed at state."""
    depth = table.deployed_depth(state)
    if depth <= 1:
        return build_payoff_matrix(state, table.config)
    return build_payoff_matrix(
        state, table.config,
        continuation=lambda s: table.horizon_value(s, depth - 1))


def _level_groups(k, b_j0):
    """Column batches at one b_t level: all b_j sharing a jammer action
    count are solved together; the 2k-1 truncated levels go singly."""
    full = 2 * k - 1
    groups = []
    if b_j0 >= full:
        groups.append((np.arange(full, b_j0 + 1), 2 * k))
    for b_j in range(min(full, b_j0 + 1)):
        groups.append((np.array([b_j]), b_j + 1))
    return groups


def solve_full_game(config):
    """Backward-induction equilibrium over the whole battery grid.

    Iterates b_t upward (frames strictly drain the transmitter), solving
    every (gamma, b_j) matrix game of a level as one simplex batch. The
    deployed strategy and value at a state are those of the
    receding-horizon matrix; horizon values for all shallower gamma are
    stored alongside.
    """
    k = config.k
    b_t0, b_j0 = config.b_t0, config.b_j0
    lam = config.discount
    base = payoff_matrix(config.subgame)
    g_store = config.effective_horizon()
    horizon_values = np.zeros((g_store + 1, b_t0 + 1, b_j0 + 1))
    t_probs = np.zeros((b_t0 + 1, b_j0 + 1, k + 1))
    j_probs = np.zeros((b_t0 + 1, b_j0 + 1, 2 * k))
    values = np.zeros((b_t0 + 1, b_j0 + 1))
    for b_t in range(k, b_t0 + 1):
        m = min(2 * k, b_t) - k + 1
        depth = min(g_store, b_t // k)
        n_ts = np.arange(k, k + m)
        succ_bt = b_t - n_ts
        alive = succ_bt >= k
        safe_bt = np.where(alive, succ_bt, k)
        for b_js, n in _level_groups(k, b_j0):
            cols = np.arange(n)
            succ_bj = b_js[:, None] - cols[None, :]
            cont = horizon_values[np.arange(depth)[:, None, None, None],
                                  safe_bt[None, None, :, None],
                                  succ_bj[None, :, None, :]]
            cont = np.where(alive[None, None, :, None], cont, 0.0)
            stage = base[None, None, :m, :n] + lam * cont
            vals, rows, colstrats = _minimax_batch(stage.reshape(-1, m, n))
            vals = vals.reshape(depth, b_js.size)
            rows = rows.reshape(depth, b_js.size, m)
            colstrats = colstrats.reshape(depth, b_js.size, n)
            horizon_values[1: depth + 1, b_t, b_js] = vals
            if depth < g_store:
                horizon_values[depth + 1:, b_t, b_js] = vals[depth - 1]
            t_probs[b_t, b_js, :m] = rows[depth - 1]
            j_probs[b_t, b_js, :n] = colstrats[depth - 1]
            values[b_t, b_js] = vals[depth - 1]
    return StrategyTable(config, t_probs, j_probs, values, horizon_values)


def dummy_jammer_policy(config):
    """Non-strategic jammer: always jams k + 1 slots while it can."""
    k = config.k
    return lambda state: min(k + 1, min(2 * k - 1, state.b_j))


def solve_vs_fixed_jammer(config, jammer_policy=None):
    """Transmitter best response against a known pure jammer policy.

    :param jammer_policy: callable state -> n_j; defaults to the dummy
        jammer that always spends k + 1 quanta

    The transmitter maximizes the same receding-horizon objective; ties
    break toward the smallest packet count, which favours battery life.
    """
    if jammer_policy is None:
        jammer_policy = dummy_jammer_policy(config)
    k = config.k
    b_t0, b_j0 = config.b_t0, config.b_j0
    lam = config.discount
    base = payoff_matrix(config.subgame)
    g_store = config.effective_horizon()
    horizon_values = np.zeros((g_store + 1, b_t0 + 1, b_j0 + 1))
    t_probs = np.zeros((b_t0 + 1, b_j0 + 1, k + 1))
    j_probs = np.zeros((b_t0 + 1, b_j0 + 1, 2 * k))
    values = np.zeros((b_t0 + 1, b_j0 + 1))
    for b_t in range(k, b_t0 + 1):
        m = min(2 * k, b_t) - k + 1
        depth = min(g_store, b_t // k)
        n_ts = np.arange(k, k + m)
        succ_bt = b_t - n_ts
        alive = succ_bt >= k
        safe_bt = np.where(alive, succ_bt, k)
        b_js = np.arange(b_j0 + 1)
        jam = np.array([jammer_policy(GameState(b_t, b_j)) for b_j in b_js])
        if ((jam < 0) | (jam > np.minimum(2 * k - 1, b_js))).any():
            raise ValueError("jammer policy returned an illegal jam count")
        succ_bj = b_js - jam
        cont = horizon_values[np.arange(depth)[:, None, None],
                              safe_bt[None, None, :],
                              succ_bj[None, :, None]]
        cont = np.where(alive[None, None, :], cont, 0.0)
        col = base[:m, jam].T                       # (b_j, m)
        q = col[None] + lam * cont                  # (depth, b_j, m)
        best = q.argmax(axis=2)                     # first max: lowest n_t
        vals = np.take_along_axis(q, best[:, :, None], axis=2)[:, :, 0]
        horizon_values[1: depth + 1, b_t, :] = vals
        if depth < g_store:
            horizon_values[depth + 1:, b_t, :] = vals[depth - 1]
        t_probs[b_t, b_js, best[depth - 1]] = 1.0
        j_probs[b_t, b_js, jam] = 1.0
        values[b_t, :] = vals[depth - 1]
    return StrategyTable(config, t_probs, j_probs, values, horizon_values)


def fixed_policy_table(config, t_policy, j_policy):
    """Table for externally imposed policies, for baselines and what-ifs.

    :param t_policy: callable state -> n_t or MixedStrategy
    :param j_policy: callable state -> n_j or MixedStrategy

    Values are the receding-horizon expected payoffs of the given play,
    found by policy evaluation over the same level order as the solver.
    """
    k = config.k
    b_t0, b_j0 = config.b_t0, config.b_j0
    lam = config.discount
    base = payoff_matrix(config.subgame)
    g_store = config.effective_horizon()
    t_probs = np.zeros((b_t0 + 1, b_j0 + 1, k + 1))
    j_probs = np.zeros((b_t0 + 1, b_j0 + 1, 2 * k))
    for b_t in range(k, b_t0 + 1):
        for b_j in range(b_j0 + 1):
            state = GameState(b_t, b_j)
            n_ts, n_js = action_sets(state, k)
            for policy, probs, actions, base_action in (
                    (t_policy, t_probs, n_ts, k),
                    (j_policy, j_probs, n_js, 0)):
                choice = policy(state)
                if isinstance(choice, MixedStrategy):
                    for action, p in zip(choice.support, choice.probs):
                        if action not in actions:
                            raise ValueError(f"illegal action {action} at {state}")
                        probs[b_t, b_j, action - base_action] = p
                else:
                    if choice not in actions:
                        raise ValueError(f"illegal action {choice} at {state}")
                    probs[b_t, b_j, choice - base_action] = 1.0
    horizon_values = np.zeros((g_store + 1, b_t0 + 1, b_j0 + 1))
    values = np.zeros((b_t0 + 1, b_j0 + 1))
    for b_t in range(k, b_t0 + 1):
        m = min(2 * k, b_t) - k + 1
        depth = min(g_store, b_t // k)
        n = 2 * k
        n_ts = np.arange(k, k + m)
        succ_bt = b_t - n_ts
        alive = succ_bt >= k
        safe_bt = np.where(alive, succ_bt, k)
        b_js = np.arange(b_j0 + 1)
        cols = np.arange(n)
        succ_bj = np.clip(b_js[:, None] - cols[None, :], 0, None)
        cont = horizon_values[np.arange(depth)[:, None, None, None],
                              safe_bt[None, None, :, None],
                              succ_bj[None, :, None, :]]
        cont = np.where(alive[None, None, :, None], cont, 0.0)
        stage = base[None, None, :m, :n] + lam * cont
        pt = t_probs[b_t, :, :m]
        pj = j_probs[b_t, :, :]
        vals = np.einsum('bi,bj,gbij->gb', pt, pj, stage)
        horizon_values[1: depth + 1, b_t, :] = vals[:depth]
        if depth < g_store:
            horizon_values[depth + 1:, b_t, :] = vals[depth - 1]
        values[b_t, :] = vals[depth - 1]
    return StrategyTable(config, t_probs, j_probs, values, horizon_values)


# ---------------------------------------------------------------------------
# persistence


def _states_payload(table):
    k = table.config.k
    payload = []
    for state in table.states():
        n_t_count = min(2 * k, state.b_t) - k + 1
        n_j_count = min(2 * k - 1, state.b_j) + 1
        payload.append({
            "b_t": state.b_t,
            "b_j": state.b_j,
            "strat_t": [float(p) for p in table.t_probs[state.b_t, state.b_j, :n_t_count]],
            "strat_j": [float(p) for p in table.j_probs[state.b_t, state.b_j, :n_j_count]],
            "value": float(table.values[state.b_t, state.b_j]),
        })
    return payload


def _checksum(states_payload):
    canonical = json.dumps(states_payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def export_table(table, path, meta=None):
    """Write a strategy table as versioned JSON.

    States are ordered by (b_t, b_j) and floats keep their shortest
    round-trip form, so identical tables produce identical bytes. A
    sha256 checksum over the state records guards against truncation.

    :param meta: optional JSON-serializable dict of caller context
        (for example the jammer distance a table was solved at)
    """
    states = _states_payload(table)
    doc = {
        "format": TABLE_FORMAT,
        "version": TABLE_VERSION,
        "config": table.config.to_dict(),
        "checksum": _checksum(states),
        "states": states,
    }
    if meta is None:
        meta = table.meta
    if meta is not None:
        doc["meta"] = meta
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_table(path):
    """Load a table written by :func:`export_table`.

    Raises :class:`TableError` on format or version mismatch, checksum
    failure, or strategy rows that are not probability distributions.
    The loaded table carries deployed strategies and values only.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TableError(f"{path}: not a valid table file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != TABLE_FORMAT:
        raise TableError(f"{path}: not a {TABLE_FORMAT} file")
    if doc.get("version") != TABLE_VERSION:
        raise TableError(f"{path}: unsupported version {doc.get('version')!r}, "
                         f"expected {TABLE_VERSION}")
    for field in ("config", "checksum", "states"):
        if field not in doc:
            raise TableError(f"{path}: missing field {field!r}")
    config = GameConfig.from_dict(doc["config"])
    states = doc["states"]
    if _checksum(states) != doc["checksum"]:
        raise TableError(f"{path}: checksum mismatch, file corrupt or truncated")
    k = config.k
    t_probs = np.zeros((config.b_t0 + 1, config.b_j0 + 1, k + 1))
    j_probs = np.zeros((config.b_t0 + 1, config.b_j0 + 1, 2 * k))
    values = np.zeros((config.b_t0 + 1, config.b_j0 + 1))
    seen = 0
    try:
        for rec in states:
            b_t, b_j = rec["b_t"], rec["b_j"]
            if not (k <= b_t <= config.b_t0 and 0 <= b_j <= config.b_j0):
                raise TableError(f"{path}: state ({b_t}, {b_j}) outside the grid")
            strat_t = rec["strat_t"]
            strat_j = rec["strat_j"]
            if (len(strat_t) != min(2 * k, b_t) - k + 1
                    or len(strat_j) != min(2 * k - 1, b_j) + 1):
                raise TableError(f"{path}: wrong strategy length at ({b_t}, {b_j})")
            t_probs[b_t, b_j, : len(strat_t)] = strat_t
            j_probs[b_t, b_j, : len(strat_j)] = strat_j
            values[b_t, b_j] = rec["value"]
            seen += 1
    except (KeyError, TypeError, ValueError) as exc:
        raise TableError(f"{path}: malformed state record: {exc}") from None
    expected = max(0, config.b_t0 - k + 1) * (config.b_j0 + 1)
    if seen != expected:
        raise TableError(f"{path}: {seen} states, expected {expected}")
    for probs, label in ((t_probs, "strat_t"), (j_probs, "strat_j")):
        sums = probs[k:, :, :].sum(axis=2)
        if (probs < 0.0).any() or (np.abs(sums - 1.0) > 1e-9).any():
            raise TableError(f"{path}: {label} rows are not distributions")
    return StrategyTable(config, t_probs, j_probs, values,
                         horizon_values=None, meta=doc.get("meta"))
