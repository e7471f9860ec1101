"""Value iteration for the failure probability on a discretized grid.

Each grid point is reconstructed into a real scene and stepped through the
simulator once per disturbance; successor values come from multilinear
interpolation, while each successor's crash/terminal status is judged from
its exact continuous state.  The transition footprint (corner indices and
weights, with the disturbance probabilities folded in) is precomputed, so
a sweep is a single gather.  Sweeps are monotone nondecreasing from zero.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import (GridSpec, ValueGrid, pair_grid_spec, pair_project_batch,
                   reconstruct_pair_rows)
from .scenario import Scenario, ScenarioConfig
from .toy import ChainMdp

_CHUNK = 120_000


@dataclass
class GridProblem:
    """A batch system bound to a grid discretization of its state."""
    system: object
    spec: GridSpec
    pair_index: int = 0

    def reconstruct(self, cont, disc):
        raise NotImplementedError

    def project(self, states):
        raise NotImplementedError


class PairGridProblem(GridProblem):
    """Ego versus one adversary, on the 15^4 x 2 x 2 grid."""

    def __init__(self, parent_config: ScenarioConfig, adversary_index: int,
                 parent: Scenario | None = None):
        parent = parent or Scenario(parent_config)
        pair_scenario = Scenario(parent_config.pair_subproblem(adversary_index))
        super().__init__(system=pair_scenario,
                         spec=pair_grid_spec(parent, adversary_index),
                         pair_index=adversary_index)

    def reconstruct(self, cont, disc):
        return reconstruct_pair_rows(self.system, cont, disc)

    def project(self, states):
        return pair_project_batch(self.system, states, 0)


class ChainGridProblem(GridProblem):
    """The enumerable chain on its five integer positions."""

    def __init__(self):
        chain = ChainMdp()
        spec = GridSpec(axes=(np.arange(5.0),), axis_names=("position",))
        super().__init__(system=chain, spec=spec)

    def reconstruct(self, cont, disc):
        return cont.copy()

    def project(self, states):
        return states.copy(), np.empty((len(states), 0), dtype=int)


def _footprint(spec: GridSpec, cont, disc):
    """Flat corner indices and multilinear weights for query points."""
    nc = len(spec.axes)
    n = len(cont)
    strides = np.empty(len(spec.shape), dtype=int)
    strides[-1] = 1
    for d in range(len(spec.shape) - 2, -1, -1):
        strides[d] = strides[d + 1] * spec.shape[d + 1]

    lo = np.empty((n, nc), dtype=int)
    frac = np.empty((n, nc))
    for d, knots in enumerate(spec.axes):
        x = np.clip(cont[:, d], knots[0], knots[-1])
        i = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, len(knots) - 2)
        lo[:, d] = i
        frac[:, d] = (x - knots[i]) / (knots[i + 1] - knots[i])

    base = np.zeros(n, dtype=int)
    for d in range(disc.shape[1]):
        base += disc[:, d] * strides[nc + d]

    n_corners = 1 << nc
    idx = np.empty((n, n_corners), dtype=np.int64)
    wts = np.empty((n, n_corners))
    for corner in range(n_corners):
        ci = base.copy()
        w = np.ones(n)
        for d in range(nc):
            up = (corner >> d) & 1
            ci += (lo[:, d] + up) * strides[d]
            w *= frac[:, d] if up else (1.0 - frac[:, d])
        idx[:, corner] = ci
        wts[:, corner] = w
    return idx, wts


def value_iteration(problem: GridProblem, tol: float = 1e-6,
                    max_sweeps: int = 500, verbose: bool = False) -> ValueGrid:
    """Solve v = failure probability at every grid point.

    Stops when the sup-norm change of a sweep drops below tol; if
    max_sweeps is reached first the grid is returned with converged=False
    and a warning.
    """
    spec = problem.spec
    system = problem.system
    cont, disc = spec.grid_coordinates()
    n = len(cont)
    states = problem.reconstruct(cont, disc)
    fail0, term0 = system.classify_batch(states)
    live = np.nonzero(~term0)[0]
    probs = system.model_probs
    k = system.n_disturbances
    n_corners = 1 << len(spec.axes)

    t0 = time.time()
    idx = np.zeros((len(live), k * n_corners), dtype=np.int64)
    wts = np.zeros((len(live), k * n_corners))
    const = np.zeros(len(live))
    for start in range(0, len(live), _CHUNK):
        rows = live[start:start + _CHUNK]
        block = states[rows]
        for x in range(k):
            succ = system.step_batch(block, np.full(len(rows), x, dtype=int))
            sfail, sterm = system.classify_batch(succ)
            const[start:start + _CHUNK] += probs[x] * sfail
            alive = ~sterm
            if np.any(alive):
                cont_s, disc_s = problem.project(succ[alive])
                ci, cw = _footprint(spec, cont_s, disc_s)
                sl = slice(start, start + _CHUNK)
                cols = slice(x * n_corners, (x + 1) * n_corners)
                idx[sl, cols][alive] = ci
                wts[sl, cols][alive] = probs[x] * cw
    if verbose:
        print(f"transition footprint built in {time.time() - t0:.1f}s "
              f"({n} points, {k} disturbances)")

    v = np.zeros(n)
    v[fail0] = 1.0
    residual = np.inf
    sweeps = 0
    while sweeps < max_sweeps:
        new_live = const + np.einsum("ij,ij->i", wts, v[idx])
        residual = float(np.max(np.abs(new_live - v[live]))) if len(live) else 0.0
        if np.any(new_live < v[live] - 1e-12):
            raise AssertionError("value sweep decreased somewhere")
        if np.any(new_live > 1.0 + 1e-12):
            raise AssertionError("value sweep left [0, 1]")
        v[live] = new_live
        sweeps += 1
        if verbose and sweeps % 25 == 0:
            print(f"  sweep {sweeps}: residual {residual:.3e}")
        if residual < tol:
            break
    converged = residual < tol
    if not converged:
        warnings.warn(f"value iteration stopped at {max_sweeps} sweeps "
                      f"with residual {residual:.3e}")
    return ValueGrid(spec=spec, values=v, pair_index=problem.pair_index,
                     converged=converged, residual=residual)


def solve_pair_grids(config: ScenarioConfig, tol: float = 1e-6,
                     max_sweeps: int = 500, verbose: bool = False):
    """One ValueGrid per adversary; identical-origin subproblems share a
    single solve."""
    parent = Scenario(config)
    grids = []
    by_origin: dict[int, ValueGrid] = {}
    for i, spec in enumerate(config.adversaries):
        origin = spec.origin_id()
        if origin in by_origin:
            done = by_origin[origin]
            grids.append(ValueGrid(spec=done.spec, values=done.values.copy(),
                                   pair_index=i, converged=done.converged,
                                   residual=done.residual))
            continue
        problem = PairGridProblem(config, i, parent=parent)
        grid = value_iteration(problem, tol=tol, max_sweeps=max_sweeps,
                               verbose=verbose)
        by_origin[origin] = grid
        grids.append(grid)
    return grids
