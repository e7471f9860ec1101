"""Discretization grids and multilinear interpolation of failure values.

A grid has uniform knots on each continuous axis plus exactly-indexed
discrete axes.  Queries outside the knot range clamp to the boundary.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import DRIVABLE_VARIANTS, ROUTE_ORIGIN
from .scenario import Scenario, SceneState

KNOTS_PER_AXIS = 15
VEL_AXIS_MAX = 32.0


@dataclass(frozen=True)
class GridSpec:
    """Axes of one ego-adversary subproblem grid."""
    axes: tuple[np.ndarray, ...]          # knot arrays, continuous dims
    discrete_sizes: tuple[int, ...] = ()
    axis_names: tuple[str, ...] = ()

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes) + tuple(self.discrete_sizes)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))

    def grid_coordinates(self):
        """Mesh of all grid points: (continuous (N, c), discrete (N, d))."""
        mesh = np.meshgrid(*self.axes,
                           *[np.arange(s) for s in self.discrete_sizes],
                           indexing="ij")
        flat = [m.reshape(-1) for m in mesh]
        nc = len(self.axes)
        cont = np.stack(flat[:nc], axis=1) if nc else np.empty((len(flat[0]), 0))
        disc = (np.stack(flat[nc:], axis=1).astype(int)
                if self.discrete_sizes else np.empty((len(flat[0]), 0), dtype=int))
        return cont, disc


def pair_grid_spec(scenario: Scenario, adversary_index: int) -> GridSpec:
    """15-knot axes over ego/adversary position and speed, plus the
    adversary's signal and route-branch bits."""
    spec = scenario.config.adversaries[adversary_index]
    adv_len = scenario.origin_route_length(spec.origin_id())
    axes = (
        np.linspace(0.0, scenario.ego_route_length, KNOTS_PER_AXIS),
        np.linspace(0.0, VEL_AXIS_MAX, KNOTS_PER_AXIS),
        np.linspace(0.0, adv_len, KNOTS_PER_AXIS),
        np.linspace(0.0, VEL_AXIS_MAX, KNOTS_PER_AXIS),
    )
    return GridSpec(axes=axes, discrete_sizes=(2, 2),
                    axis_names=("ego_pos", "ego_vel", "adv_pos", "adv_vel",
                                "adv_blinker", "adv_route"))


@dataclass
class ValueGrid:
    spec: GridSpec
    values: np.ndarray                   # spec.shape, each entry in [0, 1]
    pair_index: int = 0
    converged: bool = True
    residual: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.spec.shape)

    def interpolate_batch(self, cont: np.ndarray, disc: np.ndarray) -> np.ndarray:
        return interpolate_batch(self, cont, disc)


@dataclass(frozen=True)
class PairState:
    """Ego paired with a single adversary; the DP subproblem state."""
    ego_pos: float
    ego_vel: float
    adv_pos: float
    adv_vel: float
    adv_blinker: bool
    adv_route: int          # 0 straight branch, 1 turn branch

    def continuous(self) -> np.ndarray:
        return np.array([self.ego_pos, self.ego_vel, self.adv_pos, self.adv_vel])

    def discrete(self) -> np.ndarray:
        return np.array([int(self.adv_blinker), int(self.adv_route)], dtype=int)


def pair_projection(scenario: Scenario, scene: SceneState,
                    adversary_index: int) -> PairState:
    if not 0 <= adversary_index < len(scene.adversaries):
        raise IndexError(f"adversary index {adversary_index} out of range")
    adv = scene.adversaries[adversary_index]
    origin = ROUTE_ORIGIN[adv.route_id]
    straight, turn = DRIVABLE_VARIANTS[origin]
    turn_branch = int(straight != turn and adv.route_id == turn)
    return PairState(ego_pos=scene.ego.pos, ego_vel=scene.ego.vel,
                     adv_pos=adv.pos, adv_vel=adv.vel,
                     adv_blinker=adv.blinker, adv_route=turn_branch)


def pair_project_batch(scenario: Scenario, states: np.ndarray,
                       adversary_index: int):
    """(continuous, discrete) arrays of the pair projection of scene rows."""
    slot = 1 + adversary_index
    base = scenario._col(slot, 0)
    ego = scenario._col(0, 0)
    cont = np.stack([states[:, ego + 1], states[:, ego + 2],
                     states[:, base + 1], states[:, base + 2]], axis=1)
    origin = scenario.config.adversaries[adversary_index].origin_id()
    straight, turn = DRIVABLE_VARIANTS[origin]
    turn_route = turn if turn != straight else -1
    disc = np.stack([states[:, base + 3].astype(int),
                     (states[:, base] == turn_route).astype(int)], axis=1)
    return cont, disc


def reconstruct_pair_scene(pair_scenario: Scenario, ps: PairState) -> SceneState:
    """Two-vehicle scene matching a pair state, at step 0."""
    cont = ps.continuous()[None, :]
    disc = ps.discrete()[None, :]
    row = reconstruct_pair_rows(pair_scenario, cont, disc)[0]
    return pair_scenario.row_to_scene(row)


def reconstruct_pair_rows(pair_scenario: Scenario, cont: np.ndarray,
                          disc: np.ndarray) -> np.ndarray:
    """State rows for a batch of pair coordinates (step index 0).

    The adversary's intent bit is set to match its route branch so that
    projecting the reconstruction is the identity.
    """
    if pair_scenario.n_adversaries != 1:
        raise ValueError("pair reconstruction needs a single-adversary scenario")
    n = len(cont)
    origin = pair_scenario.config.adversaries[0].origin_id()
    straight, turn = DRIVABLE_VARIANTS[origin]
    rows = np.zeros((n, pair_scenario.state_dim))
    ego = pair_scenario._col(0, 0)
    rows[:, ego + 0] = 0  # ego route id
    rows[:, ego + 1] = cont[:, 0]
    rows[:, ego + 2] = cont[:, 1]
    rows[:, ego + 3] = 1.0
    rows[:, ego + 4] = 1.0
    base = pair_scenario._col(1, 0)
    turn_bit = disc[:, 1].astype(float)
    rows[:, base + 0] = np.where(turn_bit > 0, turn, straight)
    rows[:, base + 1] = cont[:, 2]
    rows[:, base + 2] = cont[:, 3]
    rows[:, base + 3] = disc[:, 0]
    rows[:, base + 4] = turn_bit
    return rows


def interpolate(grid: ValueGrid, ps: PairState) -> float:
    val = interpolate_batch(grid, ps.continuous()[None, :], ps.discrete()[None, :])
    return float(val[0])


def interpolate_batch(grid: ValueGrid, cont: np.ndarray,
                      disc: np.ndarray) -> np.ndarray:
    """Multilinear interpolation on the continuous axes, exact indexing on
    the discrete axes; out-of-range queries clamp to the boundary."""
    spec = grid.spec
    n = len(cont)
    nc = len(spec.axes)
    lo = np.empty((n, nc), dtype=int)
    frac = np.empty((n, nc))
    for d, knots in enumerate(spec.axes):
        x = np.clip(cont[:, d], knots[0], knots[-1])
        i = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, len(knots) - 2)
        lo[:, d] = i
        frac[:, d] = (x - knots[i]) / (knots[i + 1] - knots[i])

    flat = grid.values.reshape(-1)
    strides = np.array([s // grid.values.itemsize
                        for s in grid.values.strides], dtype=int)
    base = np.zeros(n, dtype=int)
    for d in range(len(spec.discrete_sizes)):
        base += disc[:, d] * strides[nc + d]

    out = np.zeros(n)
    for corner in range(1 << nc):
        idx = base.copy()
        w = np.ones(n)
        for d in range(nc):
            up = (corner >> d) & 1
            idx += (lo[:, d] + up) * strides[d]
            w *= frac[:, d] if up else (1.0 - frac[:, d])
        out += w * flat[idx]
    return out


_MAGIC = b"FDVG"


def save_value_grid(grid: ValueGrid, path) -> None:
    """Header (axes, discrete sizes, pair index, convergence) then the
    row-major value array, all little-endian."""
    spec = grid.spec
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HHB?d", len(spec.axes), len(spec.discrete_sizes),
                             grid.pair_index, grid.converged, grid.residual))
        for knots in spec.axes:
            fh.write(struct.pack("<I", len(knots)))
            fh.write(np.asarray(knots, dtype="<f8").tobytes())
        for size in spec.discrete_sizes:
            fh.write(struct.pack("<I", size))
        names = ",".join(spec.axis_names).encode()
        fh.write(struct.pack("<I", len(names)))
        fh.write(names)
        fh.write(np.ascontiguousarray(grid.values, dtype="<f8").tobytes())


def load_value_grid(path) -> ValueGrid:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path} is not a value-grid file")
        n_axes, n_disc, pair_index, converged, residual = struct.unpack(
            "<HHB?d", fh.read(struct.calcsize("<HHB?d")))
        axes = []
        for _ in range(n_axes):
            (k,) = struct.unpack("<I", fh.read(4))
            axes.append(np.frombuffer(fh.read(8 * k), dtype="<f8").copy())
        sizes = tuple(struct.unpack("<I", fh.read(4))[0] for _ in range(n_disc))
        (name_len,) = struct.unpack("<I", fh.read(4))
        names = tuple(fh.read(name_len).decode().split(",")) if name_len else ()
        spec = GridSpec(axes=tuple(axes), discrete_sizes=sizes, axis_names=names)
        values = np.frombuffer(fh.read(8 * spec.n_points), dtype="<f8").copy()
    return ValueGrid(spec=spec, values=values, pair_index=pair_index,
                     converged=converged, residual=residual)
