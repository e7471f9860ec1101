"""Multi-vehicle T-intersection simulator.

Every vehicle follows the IDM law toward its leader plus a rule-based
junction yield: a vehicle without right of way brakes toward the junction
entry whenever another agent is predicted to occupy the junction during its
own crossing window.  Turning intent of other cars is judged from their
turn signal, not from their hidden intent bit.  Disturbances perturb one
adversary per step: an acceleration offset, a signal toggle, or an intent
toggle.

State is stored as flat float rows so that grids of states and batches of
rollouts step through the same vectorized code path; the dataclass API
wraps single rows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .geometry import (APPARENT_VARIANTS, DRIVABLE_VARIANTS, EGO_LEFT_TURN,
                       LEFT_STRAIGHT, ORIGIN_EGO, ORIGIN_LEFT, ORIGIN_RIGHT,
                       ROUTE_ORIGIN)
from .idm import IdmParams, idm_acceleration_arr

VEL_MAX = 32.0          # grid / sanity ceiling on speeds, m/s
LEADER_LATERAL_TOL = 1.5
LEADER_ALIGN_COS = math.cos(math.radians(45.0))
MIN_GAP = 0.01          # floor for degenerate projected gaps
SPEED_FLOOR = 0.1       # m/s floor when predicting crossing times


class Disturbance(enum.IntEnum):
    NO_DISTURB = 0
    MEDIUM_SLOW = 1
    MAJOR_SLOW = 2
    MEDIUM_SPEED = 3
    MAJOR_SPEED = 4
    TOGGLE_BLINKER = 5
    TOGGLE_INTENT = 6

    @property
    def accel_delta(self) -> float:
        return float(ACCEL_DELTAS[self])

    @property
    def nominal_prob(self) -> float:
        return float(NOMINAL_PROBS[self])


ACCEL_DELTAS = np.array([0.0, -1.5, -3.0, 1.5, 3.0, 0.0, 0.0])
NOMINAL_PROBS = np.array([0.976, 1e-2, 1e-3, 1e-2, 1e-3, 1e-3, 1e-3])
N_KINDS = len(ACCEL_DELTAS)


@dataclass(frozen=True)
class JointDisturbance:
    actor_index: int
    disturbance: Disturbance


@dataclass(frozen=True)
class VehicleState:
    route_id: int
    pos: float
    vel: float
    blinker: bool
    intent_turn: bool
    half_length: float = 2.0
    half_width: float = 0.9


@dataclass(frozen=True)
class SceneState:
    ego: VehicleState
    adversaries: tuple[VehicleState, ...]
    step_index: int
    dt: float

    @property
    def vehicles(self) -> tuple[VehicleState, ...]:
        return (self.ego,) + tuple(self.adversaries)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AdversarySpec:
    """Initial-condition window for one adversary."""
    origin: str                      # "left" or "right"
    pos_range: tuple[float, float]
    vel_range: tuple[float, float]
    blinker: bool = False
    intent_turn: bool = False

    def origin_id(self) -> int:
        try:
            return {"left": ORIGIN_LEFT, "right": ORIGIN_RIGHT}[self.origin]
        except KeyError:
            raise ConfigError(f"unknown adversary origin {self.origin!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    adversaries: tuple[AdversarySpec, ...]
    dt: float = 0.18
    horizon: int | None = 50
    yield_margin: float = 0.5        # safety margin on predicted exit times, s
    merge_clearance: float = 10.0    # extra arclength the ego keeps clear past the junction, m
    idm: IdmParams = IdmParams()
    half_length: float = 2.0
    half_width: float = 0.9
    ego_vel: float = 12.0
    ego_approach: float = 25.0       # stem length ahead of the junction, m
    through_reach: float = 45.0      # through-road length ahead of the junction, m
    pair_mode: bool = False          # terminate once the adversary is gone

    def pair_subproblem(self, adversary_index: int) -> "ScenarioConfig":
        adv = self.adversaries[adversary_index]
        return replace(self, name=f"{self.name}-pair{adversary_index}",
                       adversaries=(adv,), horizon=None, pair_mode=True)


def two_car_config(**overrides) -> ScenarioConfig:
    cfg = ScenarioConfig(
        name="two_car",
        adversaries=(AdversarySpec("right", (2.0, 28.0), (15.0, 25.0)),),
    )
    return replace(cfg, **overrides) if overrides else cfg


def five_car_config(**overrides) -> ScenarioConfig:
    cfg = ScenarioConfig(
        name="five_car",
        adversaries=(
            AdversarySpec("right", (14.0, 26.0), (15.0, 25.0),
                          blinker=True, intent_turn=True),
            AdversarySpec("right", (0.0, 10.0), (15.0, 25.0)),
            AdversarySpec("left", (20.0, 36.0), (17.0, 26.0)),
            AdversarySpec("left", (4.0, 16.0), (17.0, 26.0)),
        ),
    )
    return replace(cfg, **overrides) if overrides else cfg


PRESETS = {"two_car": two_car_config, "five_car": five_car_config}

# state row layout: [step_index, (route, pos, vel, blinker, intent) * vehicle]
_FIELDS_PER_VEHICLE = 5
_ROUTE, _POS, _VEL, _BLINK, _INTENT = range(_FIELDS_PER_VEHICLE)


def _arrival_time(v, a, d):
    """Time for a vehicle at speed v, acceleration a, to advance distance d.

    Returns inf where the vehicle would stop short.  Speeds are floored so
    a currently stopped vehicle still registers as (slowly) arriving.
    """
    v = np.maximum(v, SPEED_FLOOR)
    disc = v * v + 2.0 * a * d
    linear = d / v
    with np.errstate(invalid="ignore", divide="ignore"):
        quad = (np.sqrt(np.maximum(disc, 0.0)) - v) / a
    t = np.where(np.abs(a) < 1e-9, linear, quad)
    return np.where(disc <= 0.0, np.inf, t)


class Scenario:
    """Vectorized simulator bound to one scenario configuration."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.routes = geometry.build_routes(through_reach=config.through_reach,
                                            ego_approach=config.ego_approach)
        self.n_adversaries = len(config.adversaries)
        if self.n_adversaries == 0:
            raise ConfigError("scenario needs at least one adversary")
        self.n_vehicles = 1 + self.n_adversaries
        self.state_dim = 1 + _FIELDS_PER_VEHICLE * self.n_vehicles
        self.n_disturbances = N_KINDS * self.n_adversaries

        self._route_len = np.zeros(len(self.routes))
        self._box_enter = np.zeros(len(self.routes))
        self._box_exit = np.zeros(len(self.routes))
        for rid, rt in self.routes.items():
            self._route_len[rid] = rt.length
            self._box_enter[rid] = rt.box_enter
            self._box_exit[rid] = rt.box_exit
        self._divergence = {
            o: geometry.divergence_arclength(self.routes, o)
            for o in (ORIGIN_EGO, ORIGIN_LEFT, ORIGIN_RIGHT)
        }
        # routes that continue on the ego's merge lane past the junction
        self._merge_follow = np.array(
            [rid == LEFT_STRAIGHT for rid in sorted(self.routes)])
        self._routes_conflict = self._route_conflict_table(config)
        # variant tables indexed by (origin, turn_bit)
        self._variant = np.zeros((3, 2), dtype=int)
        for o, pair in DRIVABLE_VARIANTS.items():
            self._variant[o] = pair
        self._apparent = np.zeros((3, 2), dtype=int)
        for o, pair in APPARENT_VARIANTS.items():
            self._apparent[o] = pair

        self._origins = [spec.origin_id() for spec in config.adversaries]
        self._validate_ranges()

        # joint disturbances ordered actor-major
        self.joint_disturbances = tuple(
            JointDisturbance(a, Disturbance(k))
            for a in range(self.n_adversaries) for k in range(N_KINDS)
        )
        self.model_probs = np.tile(NOMINAL_PROBS, self.n_adversaries) / self.n_adversaries
        self.log_model_probs = np.log(self.model_probs)

    def _validate_ranges(self):
        for i, spec in enumerate(self.config.adversaries):
            lo, hi = spec.pos_range
            limit = self.origin_route_length(spec.origin_id())
            if not (0.0 <= lo <= hi <= limit):
                raise ConfigError(
                    f"adversary {i} pos range {spec.pos_range} outside [0, {limit:.1f}]")
            vlo, vhi = spec.vel_range
            if not (0.0 <= vlo <= vhi <= VEL_MAX):
                raise ConfigError(
                    f"adversary {i} vel range {spec.vel_range} outside [0, {VEL_MAX}]")
        if not (0.0 <= self.config.ego_vel <= VEL_MAX):
            raise ConfigError("ego velocity outside grid bounds")

    def _route_conflict_table(self, config) -> np.ndarray:
        """Whether two routes' swept corridors intersect anywhere.

        A vehicle only yields to agents whose (apparent) path actually
        crosses or joins its own; a car turning off at the near corner is
        no threat to the turning ego.
        """
        n = len(self.routes)
        clearance = 2.0 * config.half_width + 0.2
        table = np.zeros((n, n), dtype=bool)
        pts = {rid: np.stack(rt.point_at(np.arange(0.0, rt.length, 0.25)), axis=1)
               for rid, rt in self.routes.items()}
        for a in range(n):
            for b in range(n):
                if a == b:
                    table[a, b] = True
                    continue
                d = np.hypot(pts[a][:, None, 0] - pts[b][None, :, 0],
                             pts[a][:, None, 1] - pts[b][None, :, 1])
                table[a, b] = bool(d.min() < clearance)
        return table

    def origin_route_length(self, origin: int) -> float:
        straight, turn = DRIVABLE_VARIANTS[origin]
        return max(self.routes[straight].length, self.routes[turn].length)

    @property
    def ego_route_length(self) -> float:
        return self.routes[EGO_LEFT_TURN].length

    # ---- row packing ------------------------------------------------------

    def _col(self, vehicle: int, offset: int) -> int:
        return 1 + _FIELDS_PER_VEHICLE * vehicle + offset

    def _cols(self, offset: int) -> np.ndarray:
        return np.array([self._col(v, offset) for v in range(self.n_vehicles)])

    def scene_to_row(self, scene: SceneState) -> np.ndarray:
        row = np.zeros(self.state_dim)
        row[0] = scene.step_index
        for v, veh in enumerate(scene.vehicles):
            base = self._col(v, 0)
            row[base + _ROUTE] = veh.route_id
            row[base + _POS] = veh.pos
            row[base + _VEL] = veh.vel
            row[base + _BLINK] = float(veh.blinker)
            row[base + _INTENT] = float(veh.intent_turn)
        return row

    def row_to_scene(self, row: np.ndarray) -> SceneState:
        vehicles = []
        for v in range(self.n_vehicles):
            base = self._col(v, 0)
            vehicles.append(VehicleState(
                route_id=int(row[base + _ROUTE]),
                pos=float(row[base + _POS]),
                vel=float(row[base + _VEL]),
                blinker=bool(row[base + _BLINK]),
                intent_turn=bool(row[base + _INTENT]),
                half_length=self.config.half_length,
                half_width=self.config.half_width,
            ))
        return SceneState(ego=vehicles[0], adversaries=tuple(vehicles[1:]),
                          step_index=int(row[0]), dt=self.config.dt)

    # ---- batched core -----------------------------------------------------

    def initial_batch(self, n: int, rng: np.random.Generator) -> np.ndarray:
        states = np.zeros((n, self.state_dim))
        base = self._col(0, 0)
        states[:, base + _ROUTE] = EGO_LEFT_TURN
        states[:, base + _VEL] = self.config.ego_vel
        states[:, base + _BLINK] = 1.0   # the ego always signals its turn
        states[:, base + _INTENT] = 1.0
        for i, spec in enumerate(self.config.adversaries):
            base = self._col(1 + i, 0)
            origin = self._origins[i]
            states[:, base + _ROUTE] = self._variant[origin, int(spec.intent_turn)]
            states[:, base + _POS] = rng.uniform(*spec.pos_range, size=n)
            states[:, base + _VEL] = rng.uniform(*spec.vel_range, size=n)
            states[:, base + _BLINK] = float(spec.blinker)
            states[:, base + _INTENT] = float(spec.intent_turn)
        return states

    def world_pose(self, routes, pos):
        """(x, y, heading) for vehicles given route ids and arclengths."""
        x = np.zeros_like(pos)
        y = np.zeros_like(pos)
        h = np.zeros_like(pos)
        for rid, rt in self.routes.items():
            m = routes == rid
            if np.any(m):
                x[m], y[m] = rt.point_at(pos[m])
                h[m] = rt.heading_at(pos[m])
        return x, y, h

    def _unpack(self, states):
        routes = states[:, self._cols(_ROUTE)].astype(int)
        pos = states[:, self._cols(_POS)]
        vel = states[:, self._cols(_VEL)]
        blink = states[:, self._cols(_BLINK)] != 0.0
        intent = states[:, self._cols(_INTENT)] != 0.0
        return routes, pos, vel, blink, intent

    def active_mask(self, routes, pos):
        return pos <= self._route_len[routes]

    def compute_accel_batch(self, states: np.ndarray) -> np.ndarray:
        routes, pos, vel, blink, _ = self._unpack(states)
        active = self.active_mask(routes, pos)
        x, y, h = self.world_pose(routes, pos)
        V = self.n_vehicles
        hl2 = 2.0 * self.config.half_length

        gap = np.full(pos.shape, np.inf)
        v_lead = np.zeros(pos.shape)
        for me in range(V):
            my_routes = routes[:, me]
            for other in range(V):
                if other == me:
                    continue
                s_o = np.zeros(len(states))
                d_o = np.full(len(states), np.inf)
                h_o = np.zeros(len(states))
                for rid, rt in self.routes.items():
                    m = my_routes == rid
                    if np.any(m):
                        s_o[m], d_o[m] = rt.project(x[m, other], y[m, other])
                        h_o[m] = rt.heading_at(s_o[m])
                aligned = np.cos(h[:, other] - h_o) >= LEADER_ALIGN_COS
                ahead = s_o > pos[:, me]
                cand = active[:, other] & aligned & ahead & (d_o <= LEADER_LATERAL_TOL)
                g = np.maximum(s_o - pos[:, me] - hl2, MIN_GAP)
                g = np.where(cand, g, np.inf)
                closer = g < gap[:, me]
                gap[:, me] = np.where(closer, g, gap[:, me])
                v_lead[:, me] = np.where(closer, vel[:, other], v_lead[:, me])

        acc = idm_acceleration_arr(gap, vel, v_lead, self.config.idm)

        # junction yield for vehicles without right of way (the turning ego):
        # brake toward a virtual stopped car at the junction entry whenever
        # some agent is predicted to be inside the junction at the moment
        # this vehicle would finish crossing it.
        eps = self.config.yield_margin
        a_max = self.config.idm.a_max
        merge_pad = self.config.merge_clearance
        for me in range(V):
            no_row = routes[:, me] == EGO_LEFT_TURN
            if not np.any(no_row):
                continue
            own_enter = self._box_enter[routes[:, me]]
            own_exit = self._box_exit[routes[:, me]]
            ds_int = own_enter - pos[:, me]
            # own junction interval assumes committed full acceleration; a
            # current-speed estimate is unstable (braking inflates it, which
            # clears the predicted conflict and releases the brake again)
            v_me = vel[:, me]
            d_enter = np.maximum(ds_int, 0.0)
            t_my_enter = (np.sqrt(v_me ** 2 + 2.0 * a_max * d_enter) - v_me) / a_max

            def _exit_time(pad):
                d = np.maximum(own_exit + pad - pos[:, me], 0.0)
                return (np.sqrt(v_me ** 2 + 2.0 * a_max * d) - v_me) / a_max

            t_my_exit = _exit_time(0.0)
            t_my_exit_merge = _exit_time(merge_pad)
            engaged = no_row & active[:, me] & (ds_int < gap[:, me])
            conflict = np.zeros(len(states), dtype=bool)
            for other in range(V):
                if other == me:
                    continue
                apparent = self._apparent_route(routes[:, other], pos[:, other],
                                                blink[:, other])
                a_enter = self._box_enter[apparent]
                a_exit = self._box_exit[apparent]
                # predict the agent under its currently observed acceleration;
                # pure current-speed extrapolation goes stale while agents pull
                # toward their desired speed.  Braking never counts toward
                # arrival (a car slowed by its leader may be released at any
                # moment) but does extend predicted occupancy.
                d_in = np.maximum(a_enter - pos[:, other], 0.0)
                d_out = a_exit - pos[:, other]
                tt_enter = _arrival_time(vel[:, other],
                                         np.maximum(acc[:, other], 0.0), d_in)
                tt_exit = _arrival_time(vel[:, other], acc[:, other],
                                        np.maximum(d_out, 0.0))
                gone = pos[:, other] >= a_exit
                tt_enter = np.where(gone, np.inf, tt_enter)
                # an agent headed for this vehicle's merge lane must also
                # clear the first stretch past the junction, not just the box
                t_out = np.where(self._merge_follow[apparent],
                                 t_my_exit_merge, t_my_exit)
                # occupancy windows overlap: the agent enters before this
                # vehicle leaves (margin eps) and does not clear (plus eps)
                # before it arrives; agents whose apparent path never meets
                # this vehicle's route are ignored
                crossing = self._routes_conflict[routes[:, me], apparent]
                conflict |= (crossing & active[:, other]
                             & (tt_enter < t_out + eps)
                             & (tt_exit + eps > t_my_enter))
            hold = engaged & conflict
            if np.any(hold):
                brake = idm_acceleration_arr(np.maximum(ds_int, MIN_GAP),
                                             vel[:, me], 0.0, self.config.idm)
                acc[:, me] = np.where(hold, brake, acc[:, me])
        return acc

    def _apparent_route(self, routes, pos, blink):
        """Route an observer attributes to a vehicle from its turn signal.

        Before the straight/turn variants diverge the signal decides; past
        the divergence the branch actually taken is visible.
        """
        origins = np.array([ROUTE_ORIGIN[r] for r in range(len(self._route_len))])[routes]
        sdiv = np.array([self._divergence[ORIGIN_EGO],
                         self._divergence[ORIGIN_LEFT],
                         self._divergence[ORIGIN_RIGHT]])[origins]
        guessed = self._apparent[origins, blink.astype(int)]
        return np.where(pos < sdiv, guessed, routes)

    def step_batch(self, states: np.ndarray, x_idx: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        x_idx = np.asarray(x_idx, dtype=int)
        acc = self.compute_accel_batch(states)

        out = states.copy()
        rows = np.arange(len(states))
        actor = x_idx // N_KINDS + 1       # vehicle slot of the acting adversary
        kind = x_idx % N_KINDS
        acc[rows, actor] += ACCEL_DELTAS[kind]

        blink_cols = self._cols(_BLINK)
        intent_cols = self._cols(_INTENT)
        tb = kind == Disturbance.TOGGLE_BLINKER
        ti = kind == Disturbance.TOGGLE_INTENT
        cols = blink_cols[actor[tb]]
        out[rows[tb], cols] = 1.0 - out[rows[tb], cols]
        cols = intent_cols[actor[ti]]
        out[rows[ti], cols] = 1.0 - out[rows[ti], cols]

        routes, pos, vel, _, intent = self._unpack(out)
        dt = self.config.dt
        v1 = vel + acc * dt
        stopping = v1 < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            dist_to_stop = np.where(stopping, vel ** 2 / (-2.0 * acc), 0.0)
        dp = np.where(stopping, dist_to_stop, vel * dt + 0.5 * acc * dt * dt)
        new_pos = pos + dp
        new_vel = np.maximum(v1, 0.0)

        # adversaries commit to straight-vs-turn at the divergence point;
        # until then the hidden intent selects the branch
        new_routes = routes.copy()
        for i in range(self.n_adversaries):
            origin = self._origins[i]
            straight, turn = DRIVABLE_VARIANTS[origin]
            if straight == turn:
                continue
            slot = 1 + i
            open_branch = pos[:, slot] < self._divergence[origin]
            chosen = self._variant[origin, intent[:, slot].astype(int)]
            new_routes[:, slot] = np.where(open_branch, chosen, routes[:, slot])

        out[:, self._cols(_ROUTE)] = new_routes
        out[:, self._cols(_POS)] = new_pos
        out[:, self._cols(_VEL)] = new_vel
        out[:, 0] += 1.0
        return out

    def expand_successors(self, states: np.ndarray) -> np.ndarray:
        """All disturbance successors; shape (B, K, D)."""
        B = len(states)
        K = self.n_disturbances
        tiled = np.repeat(states, K, axis=0)
        x = np.tile(np.arange(K), B)
        return self.step_batch(tiled, x).reshape(B, K, -1)

    def classify_batch(self, states: np.ndarray):
        """(failure, terminal) masks; failure implies terminal."""
        routes, pos, vel, _, _ = self._unpack(states)
        active = self.active_mask(routes, pos)
        x, y, h = self.world_pose(routes, pos)
        hl, hw = self.config.half_length, self.config.half_width

        fail = np.zeros(len(states), dtype=bool)
        ego_alive = active[:, 0]
        for a in range(1, self.n_vehicles):
            both = ego_alive & active[:, a]
            if not np.any(both):
                continue
            hit = geometry.rects_overlap(
                x[both, 0], y[both, 0], h[both, 0], hl, hw,
                x[both, a], y[both, a], h[both, a], hl, hw)
            fail[both] |= hit

        term = fail | ~ego_alive
        if self.config.horizon is not None:
            term |= states[:, 0] >= self.config.horizon
        if self.config.pair_mode:
            term |= ~np.any(active[:, 1:], axis=1)
        return fail, term

    def failure_proximity_batch(self, states: np.ndarray) -> np.ndarray:
        """Min center distance between the ego and any live adversary."""
        routes, pos, _, _, _ = self._unpack(states)
        active = self.active_mask(routes, pos)
        x, y, _ = self.world_pose(routes, pos)
        d = np.hypot(x[:, 1:] - x[:, :1], y[:, 1:] - y[:, :1])
        d = np.where(active[:, 1:] & active[:, :1], d, np.inf)
        return d.min(axis=1)

    def features_batch(self, states: np.ndarray) -> np.ndarray:
        """Per-vehicle (pos, vel, blinker, turn-branch) scaled to [0, 1]."""
        routes, pos, vel, blink, _ = self._unpack(states)
        scale = np.array([self.origin_route_length(ROUTE_ORIGIN[r])
                          for r in range(len(self._route_len))])
        turn_bit = np.zeros(len(self._route_len))
        for o, (straight, turn) in DRIVABLE_VARIANTS.items():
            if straight != turn:
                turn_bit[turn] = 1.0
        feats = np.empty((len(states), 4 * self.n_vehicles))
        feats[:, 0::4] = np.clip(pos / scale[routes], 0.0, 1.0)
        feats[:, 1::4] = np.clip(vel / VEL_MAX, 0.0, 1.0)
        feats[:, 2::4] = blink.astype(float)
        feats[:, 3::4] = turn_bit[routes]
        return feats

    # ---- scalar API -------------------------------------------------------

    def initial_scene(self, rng: np.random.Generator) -> SceneState:
        return self.row_to_scene(self.initial_batch(1, rng)[0])

    def compute_acceleration(self, vehicle_index: int, scene: SceneState) -> float:
        veh = scene.vehicles[vehicle_index]
        if veh.pos > self.routes[veh.route_id].length:
            raise ValueError(f"vehicle {vehicle_index} has left the scene")
        row = self.scene_to_row(scene)[None, :]
        return float(self.compute_accel_batch(row)[0, vehicle_index])

    def joint_index(self, jd: JointDisturbance) -> int:
        if not 0 <= jd.actor_index < self.n_adversaries:
            raise ValueError(f"actor index {jd.actor_index} out of range")
        return jd.actor_index * N_KINDS + int(jd.disturbance)

    def step(self, scene: SceneState, jd: JointDisturbance) -> SceneState:
        if self.is_terminal(scene):
            raise ValueError("cannot step a terminal scene")
        row = self.scene_to_row(scene)[None, :]
        new = self.step_batch(row, np.array([self.joint_index(jd)]))
        return self.row_to_scene(new[0])

    def is_failure(self, scene: SceneState) -> bool:
        fail, _ = self.classify_batch(self.scene_to_row(scene)[None, :])
        return bool(fail[0])

    def is_terminal(self, scene: SceneState) -> bool:
        _, term = self.classify_batch(self.scene_to_row(scene)[None, :])
        return bool(term[0])

    def disturbance_logprob(self, jd: JointDisturbance,
                            scene: SceneState | None = None) -> float:
        return float(self.log_model_probs[self.joint_index(jd)])
