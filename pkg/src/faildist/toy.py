"""Small enumerable chain system used as an exact test bed.

Five positions on a line; position 4 is the crash state, position 0 a safe
exit.  From an interior position each step either retreats to the exit or
advances one or two cells (clamped at the crash state), so every episode
ends within four steps and all trajectory probabilities can be enumerated
exactly.  The same flat-row batch interface as the driving scenario lets
every sampler and solver run on it unchanged.
"""

from __future__ import annotations

import numpy as np

N_STATES = 5
CRASH = 4
EXIT = 0
START = 1

# disturbances: retreat to the exit, advance one, advance two
MOVES = np.array([0, 1, 2])
PROBS = np.array([0.90, 0.07, 0.03])


class ChainMdp:
    """Batch system over integer positions stored as (n, 1) float rows."""

    state_dim = 1
    n_disturbances = 3

    def __init__(self):
        self.model_probs = PROBS.copy()
        self.log_model_probs = np.log(PROBS)
        self.joint_disturbances = tuple(range(3))

    def initial_batch(self, n, rng=None):
        return np.full((n, 1), float(START))

    def step_batch(self, states, x_idx):
        k = states[:, 0].astype(int)
        x = np.asarray(x_idx, dtype=int)
        nxt = np.where(x == 0, EXIT, np.minimum(k + MOVES[x], CRASH))
        return nxt[:, None].astype(float)

    def expand_successors(self, states):
        n = len(states)
        tiled = np.repeat(states, self.n_disturbances, axis=0)
        x = np.tile(np.arange(self.n_disturbances), n)
        return self.step_batch(tiled, x).reshape(n, self.n_disturbances, -1)

    def classify_batch(self, states):
        k = states[:, 0].astype(int)
        fail = k == CRASH
        term = fail | (k == EXIT)
        return fail, term

    def failure_proximity_batch(self, states):
        return CRASH - states[:, 0]

    # scalar conveniences for readable tests
    def step(self, state: int, x: int) -> int:
        return int(self.step_batch(np.array([[float(state)]]), np.array([x]))[0, 0])

    def is_failure(self, state: int) -> bool:
        return state == CRASH

    def is_terminal(self, state: int) -> bool:
        return state in (CRASH, EXIT)


def exact_values() -> np.ndarray:
    """Failure probability per position by backward substitution."""
    v = np.zeros(N_STATES)
    v[CRASH] = 1.0
    for k in range(N_STATES - 2, EXIT, -1):
        succ = [EXIT, min(k + 1, CRASH), min(k + 2, CRASH)]
        v[k] = sum(p * v[s] for p, s in zip(PROBS, succ))
    return v


def enumerate_trajectories(system, s0, max_depth: int = 8):
    """All complete trajectories from s0 up to max_depth steps.

    Returns (states, xs, prob) triples under the nominal model.  Works on
    any scalar-steppable system whose episodes all terminate within the
    depth; raises if one does not.
    """
    out = []
    probs = np.exp(system.log_model_probs)

    def walk(state, states, xs, p):
        if system.is_terminal(state):
            out.append((states, xs, p))
            return
        if len(xs) >= max_depth:
            raise RuntimeError("trajectory exceeds enumeration depth")
        for x in range(system.n_disturbances):
            nxt = system.step(state, x)
            walk(nxt, states + [nxt], xs + [x], p * probs[x])

    walk(s0, [s0], [], 1.0)
    return out


def enumerated_value(system, s0, max_depth: int = 8) -> float:
    """Failure probability from s0 by exhaustive path enumeration."""
    total = 0.0
    for states, _, p in enumerate_trajectories(system, s0, max_depth):
        if system.is_failure(states[-1]):
            total += p
    return total


def rollout_chain_batch(n, policy_table, rng, max_steps: int = 8):
    """Vectorized chain rollouts under a state-indexed policy table.

    policy_table has one categorical row per position.  Returns the visited
    position matrix, chosen moves, per-step sampler log-likelihoods, and
    failure flags; entries past an episode's end are -1.
    """
    chain = ChainMdp()
    cum = np.cumsum(policy_table, axis=1)
    states = np.full((n, max_steps + 1), -1, dtype=int)
    moves = np.full((n, max_steps), -1, dtype=int)
    logq = np.zeros((n, max_steps))
    states[:, 0] = START
    cur = np.full(n, START)
    alive = np.ones(n, dtype=bool)
    for t in range(max_steps):
        if not alive.any():
            break
        u = rng.random(n)
        x = (u[alive, None] > cum[cur[alive]]).sum(axis=1)
        nxt = chain.step_batch(cur[alive, None].astype(float), x)[:, 0].astype(int)
        moves[alive, t] = x
        logq[alive, t] = np.log(policy_table[cur[alive], x])
        states[alive, t + 1] = nxt
        cur = cur.copy()
        cur[alive] = nxt
        fail, term = chain.classify_batch(cur[:, None].astype(float))
        alive = alive & ~term
    return states, moves, logq, cur == CRASH
