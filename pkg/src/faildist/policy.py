"""Sampling policy proportional to disturbance probability times successor
failure probability, plus rollout machinery and likelihood-ratio returns.

All samplers run batched over flat state rows; the scalar API mirrors the
batch one for single scenes.  A rollout records the model and the sampler
log-likelihood of every chosen disturbance, so importance-weighted returns
can be formed afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ValueGrid, interpolate_batch, pair_project_batch
from .scenario import JointDisturbance, Scenario, SceneState

VALUE_FLOOR = 1e-6   # keeps the sampler absolutely continuous w.r.t. the model


# ---- value-function handles ------------------------------------------------

class GridValueFunction:
    """Interpolated pair grid evaluated on full scene rows."""

    def __init__(self, scenario: Scenario, grid: ValueGrid,
                 adversary_index: int = 0):
        self.scenario = scenario
        self.grid = grid
        self.adversary_index = adversary_index

    def __call__(self, states: np.ndarray) -> np.ndarray:
        cont, disc = pair_project_batch(self.scenario, states,
                                        self.adversary_index)
        return interpolate_batch(self.grid, cont, disc)

    def at_scene(self, scene: SceneState) -> float:
        return float(self(self.scenario.scene_to_row(scene)[None, :])[0])


class TableValueFunction:
    """Exact per-state table for small systems; states index the table."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=float)

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return self.table[states[:, 0].astype(int)]


class ConstantValueFunction:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return np.full(len(states), self.value)


# ---- trajectories ----------------------------------------------------------

@dataclass
class Trajectory:
    """States s0..sN with the disturbances and likelihoods that led there."""
    states: list
    disturbances: list
    logp_model: np.ndarray
    logp_sampler: np.ndarray
    ended_in_failure: bool

    def __post_init__(self):
        self.logp_model = np.asarray(self.logp_model, dtype=float)
        self.logp_sampler = np.asarray(self.logp_sampler, dtype=float)
        n = len(self.disturbances)
        if not (len(self.states) - 1 == n == len(self.logp_model)
                == len(self.logp_sampler)):
            raise ValueError("trajectory field lengths disagree")

    def __len__(self):
        return len(self.disturbances)

    @property
    def likelihood_ratio(self) -> float:
        return float(np.exp(self.logp_model.sum() - self.logp_sampler.sum()))


def compute_returns(traj: Trajectory) -> np.ndarray:
    """Importance-weighted failure indicator seen from each visited state.

    G(s_j) multiplies the model-to-sampler likelihood ratios of the steps
    after s_j; the expectation of G(s_j) under the sampler is the failure
    probability at s_j.  One value per non-terminal state.
    """
    n = len(traj)
    if not traj.ended_in_failure:
        return np.zeros(n)
    diff = traj.logp_model - traj.logp_sampler
    suffix = np.cumsum(diff[::-1])[::-1]         # G(s_j) uses steps j+1 .. N
    return np.exp(suffix)


# ---- policy ----------------------------------------------------------------

def policy_weights_batch(system, states: np.ndarray, vf,
                         value_floor: float = VALUE_FLOOR):
    """Per-state categorical over joint disturbances plus the successor
    bundle, so callers can reuse the stepped states.

    Weight of x is p(x) times the successor's failure value: 1 for an
    immediate crash, 0 for a safe ending, otherwise vf + floor.  If every
    weight vanishes the nominal model is used.
    """
    B = len(states)
    K = system.n_disturbances
    succ = system.expand_successors(states)
    flat = succ.reshape(B * K, -1)
    sfail, sterm = system.classify_batch(flat)
    vtilde = np.where(sfail, 1.0, 0.0)
    live = ~sterm
    if np.any(live):
        vals = np.clip(np.asarray(vf(flat[live]), dtype=float), 0.0, 1.0)
        vtilde[live] = vals + value_floor
    w = system.model_probs[None, :] * vtilde.reshape(B, K)
    total = w.sum(axis=1)
    dead = total <= 0.0
    if np.any(dead):
        w[dead] = system.model_probs
        total[dead] = system.model_probs.sum()
    probs = w / total[:, None]
    return probs, succ, sfail.reshape(B, K), sterm.reshape(B, K)


def policy_distribution(system, scene, vf, value_floor: float = VALUE_FLOOR):
    """Categorical over joint disturbances for one scene."""
    if isinstance(scene, SceneState):
        if system.is_terminal(scene):
            raise ValueError("no policy at a terminal scene")
        row = system.scene_to_row(scene)[None, :]
        labels = system.joint_disturbances
    else:  # toy systems take bare states
        if system.is_terminal(scene):
            raise ValueError("no policy at a terminal state")
        row = np.array([[float(scene)]])
        labels = tuple(range(system.n_disturbances))
    probs, _, _, _ = policy_weights_batch(system, row, vf, value_floor)
    return list(zip(labels, probs[0]))


def rollout(system, s0, vf, rng: np.random.Generator,
            value_floor: float = VALUE_FLOOR, max_steps: int = 1000) -> Trajectory:
    """Sample one trajectory from the failure policy; scalar, for small
    studies and tests.  Batched rollouts live in the sampler module."""
    scenic = isinstance(s0, SceneState)
    state = s0
    states = [s0]
    xs, logp, logq = [], [], []
    for _ in range(max_steps):
        if system.is_terminal(state):
            break
        row = (system.scene_to_row(state)[None, :] if scenic
               else np.array([[float(state)]]))
        probs, succ, _, _ = policy_weights_batch(system, row, vf, value_floor)
        x = int(np.searchsorted(np.cumsum(probs[0]), rng.random()))
        x = min(x, system.n_disturbances - 1)
        nxt_row = succ[0, x]
        state = (system.row_to_scene(nxt_row) if scenic
                 else int(nxt_row[0]))
        states.append(state)
        xs.append(system.joint_disturbances[x] if scenic else x)
        logp.append(system.log_model_probs[x])
        logq.append(np.log(probs[0, x]))
    else:
        raise RuntimeError("rollout exceeded max_steps without terminating")
    failed = (system.is_failure(states[-1]))
    return Trajectory(states=states, disturbances=xs,
                      logp_model=np.array(logp), logp_sampler=np.array(logq),
                      ended_in_failure=failed)
