"""Batched trajectory sampling under the nominal model, fixed proposals, or
the value-guided failure policy.

Each call owns one rng stream; uniforms are drawn for the full batch every
step, so results do not depend on which rollouts have already terminated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .policy import VALUE_FLOOR, Trajectory, policy_weights_batch


@dataclass
class RolloutBatch:
    """Struct-of-arrays summary of a batch of rollouts."""
    failed: np.ndarray            # (n,) bool
    steps: np.ndarray             # (n,) int
    logp_model_sum: np.ndarray    # (n,)
    logp_sampler_sum: np.ndarray  # (n,)
    x_counts: np.ndarray          # (n, K) int32
    min_proximity: np.ndarray     # (n,) smaller = closer to failure

    @property
    def n(self) -> int:
        return len(self.failed)

    @property
    def failure_rate(self) -> float:
        return float(self.failed.mean())

    def likelihood_ratios(self) -> np.ndarray:
        return np.exp(self.logp_model_sum - self.logp_sampler_sum)


def rollout_batch(system, n: int, rng: np.random.Generator, vf=None,
                  proposal=None, value_floor: float = VALUE_FLOOR,
                  max_steps: int = 1000, keep_paths: bool = False):
    """Run n rollouts from fresh initial states.

    Exactly one of vf (failure-policy sampling) or proposal (a fixed
    categorical over joint disturbances; None entries of both mean the
    nominal model) drives the choice of disturbances.  With keep_paths the
    full state and step records are returned alongside the summary.
    """
    if vf is not None and proposal is not None:
        raise ValueError("pass a value function or a proposal, not both")
    K = system.n_disturbances
    if proposal is None and vf is None:
        proposal = np.exp(system.log_model_probs)
    if proposal is not None:
        proposal = np.asarray(proposal, dtype=float)
        cum = np.cumsum(proposal)

    states = system.initial_batch(n, rng)
    fail, term = system.classify_batch(states)
    alive = ~term
    failed = fail.copy()
    steps = np.zeros(n, dtype=int)
    lp_model = np.zeros(n)
    lp_sampler = np.zeros(n)
    counts = np.zeros((n, K), dtype=np.int32)
    prox = system.failure_proximity_batch(states)

    if keep_paths:
        state_hist = [states.copy()]
        x_hist = []
        logq_hist = []

    t = 0
    while alive.any():
        if t >= max_steps:
            raise RuntimeError("rollouts exceeded max_steps without terminating")
        u = rng.random(n)
        rows = np.nonzero(alive)[0]
        if vf is not None:
            probs, succ, _, _ = policy_weights_batch(
                system, states[rows], vf, value_floor)
            x = (u[rows, None] > np.cumsum(probs, axis=1)).sum(axis=1)
            x = np.minimum(x, K - 1)
            nxt = succ[np.arange(len(rows)), x]
            logq = np.log(probs[np.arange(len(rows)), x])
        else:
            x = np.minimum(np.searchsorted(cum, u[rows]), K - 1)
            nxt = system.step_batch(states[rows], x)
            logq = np.log(proposal[x])

        states[rows] = nxt
        lp_model[rows] += system.log_model_probs[x]
        lp_sampler[rows] += logq
        counts[rows, x] += 1
        steps[rows] += 1

        fail, term = system.classify_batch(states)
        failed |= fail & alive
        prox[rows] = np.minimum(prox[rows], system.failure_proximity_batch(nxt))
        alive &= ~term
        t += 1

        if keep_paths:
            full_x = np.full(n, -1, dtype=int)
            full_x[rows] = x
            full_q = np.zeros(n)
            full_q[rows] = logq
            state_hist.append(states.copy())
            x_hist.append(full_x)
            logq_hist.append(full_q)

    batch = RolloutBatch(failed=failed, steps=steps, logp_model_sum=lp_model,
                         logp_sampler_sum=lp_sampler, x_counts=counts,
                         min_proximity=prox)
    if keep_paths:
        return batch, (np.stack(state_hist), np.array(x_hist), np.array(logq_hist))
    return batch


def paths_to_trajectories(system, batch: RolloutBatch, paths) -> list[Trajectory]:
    """Reify per-rollout Trajectory objects from recorded paths."""
    state_hist, x_hist, logq_hist = paths
    out = []
    scenic = hasattr(system, "row_to_scene")
    for i in range(batch.n):
        n_i = batch.steps[i]
        states = [state_hist[t, i] for t in range(n_i + 1)]
        if scenic:
            states = [system.row_to_scene(r) for r in states]
            xs = [system.joint_disturbances[x_hist[t][i]] for t in range(n_i)]
        else:
            states = [int(r[0]) for r in states]
            xs = [int(x_hist[t][i]) for t in range(n_i)]
        logp = np.array([system.log_model_probs[x_hist[t][i]] for t in range(n_i)])
        logq = np.array([logq_hist[t][i] for t in range(n_i)])
        out.append(Trajectory(states=states, disturbances=xs, logp_model=logp,
                              logp_sampler=logq,
                              ended_in_failure=bool(batch.failed[i])))
    return out


def visited_states_and_returns(system, batch: RolloutBatch, paths):
    """Flatten recorded rollouts into (state row, return) training pairs.

    Every non-terminal visited state contributes one pair; the return is
    the failure indicator carried back through the per-step likelihood
    ratios, so its expectation is the failure probability at that state.
    """
    state_hist, x_hist, logq_hist = paths
    T = len(x_hist)
    n = batch.n
    if T == 0:
        return np.empty((0, state_hist.shape[2])), np.empty(0)
    diff = np.zeros((T, n))
    for t in range(T):
        live = x_hist[t] >= 0
        diff[t, live] = (system.log_model_probs[x_hist[t][live]]
                         - logq_hist[t][live])
    suffix = np.vstack([np.cumsum(diff[::-1], axis=0)[::-1], np.zeros((1, n))])
    rows, targets = [], []
    for t in range(T):
        live = x_hist[t] >= 0
        if not live.any():
            continue
        rows.append(state_hist[t][live])
        targets.append(np.where(batch.failed[live],
                                np.exp(suffix[t][live]), 0.0))
    return np.concatenate(rows), np.concatenate(targets)
