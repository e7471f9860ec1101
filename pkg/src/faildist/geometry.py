"""Road geometry for the T-intersection scene.

The through road runs along the x axis with two 3 m lanes (eastbound at
y = -1.5, westbound at y = +1.5).  A stem road joins from the north.  The
ego vehicle approaches on the stem heading south and turns left onto the
eastbound lane; adversaries travel the through road and may turn onto the
stem.  Routes are arclength-parameterized paths made of straight segments
and circular arcs, so positions, headings and point projections are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LANE_HALF_WIDTH = 1.5
BOX_HALF = 3.0  # junction square: |x| <= 3 and |y| <= 3

# route ids
EGO_LEFT_TURN = 0
LEFT_STRAIGHT = 1   # eastbound through traffic (enters from the west)
RIGHT_STRAIGHT = 2  # westbound through traffic (enters from the east)
RIGHT_TURN = 3      # westbound traffic turning right onto the stem
LEFT_TURN_HINT = 4  # predicted path of a signaling eastbound car; never driven

ROUTE_NAMES = {
    EGO_LEFT_TURN: "ego-left-turn",
    LEFT_STRAIGHT: "left-origin-straight",
    RIGHT_STRAIGHT: "right-origin-straight",
    RIGHT_TURN: "right-origin-turn",
    LEFT_TURN_HINT: "left-origin-turn-hint",
}

ORIGIN_EGO = 0
ORIGIN_LEFT = 1
ORIGIN_RIGHT = 2


@dataclass(frozen=True)
class _Straight:
    x0: float
    y0: float
    heading: float
    length: float

    def point(self, s):
        return (self.x0 + np.cos(self.heading) * s,
                self.y0 + np.sin(self.heading) * s)

    def head(self, s):
        return np.broadcast_to(self.heading, np.shape(s)).copy()

    def project(self, x, y):
        dx, dy = x - self.x0, y - self.y0
        ux, uy = np.cos(self.heading), np.sin(self.heading)
        t = np.clip(dx * ux + dy * uy, 0.0, self.length)
        px, py = self.x0 + ux * t, self.y0 + uy * t
        return t, np.hypot(x - px, y - py)


@dataclass(frozen=True)
class _Arc:
    cx: float
    cy: float
    radius: float
    phi0: float   # start angle from the center
    sweep: float  # signed: positive is counterclockwise

    @property
    def length(self):
        return self.radius * abs(self.sweep)

    def _phi(self, s):
        return self.phi0 + np.sign(self.sweep) * s / self.radius

    def point(self, s):
        phi = self._phi(s)
        return (self.cx + self.radius * np.cos(phi),
                self.cy + self.radius * np.sin(phi))

    def head(self, s):
        # tangent of counterclockwise travel is phi + 90 deg, clockwise is phi - 90
        return self._phi(s) + np.sign(self.sweep) * np.pi / 2

    def project(self, x, y):
        dx, dy = x - self.cx, y - self.cy
        phi = np.arctan2(dy, dx)
        # unwrap relative to the start angle, then clamp into the swept interval
        rel = (phi - self.phi0) * np.sign(self.sweep)
        rel = np.mod(rel + np.pi, 2 * np.pi) - np.pi
        rel = np.clip(rel, 0.0, abs(self.sweep))
        s = rel * self.radius
        px, py = self.point(s)
        return s, np.hypot(x - px, y - py)


class Route:
    """An arclength-parameterized path; s = 0 at the route start."""

    def __init__(self, route_id: int, pieces):
        self.route_id = route_id
        self.pieces = list(pieces)
        lens = np.array([p.length for p in self.pieces])
        self.starts = np.concatenate([[0.0], np.cumsum(lens)])
        self.length = float(self.starts[-1])
        self.box_enter, self.box_exit = self._box_interval()

    def point_at(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        x = np.zeros_like(s)
        y = np.zeros_like(s)
        for piece, lo, hi in zip(self.pieces, self.starts[:-1], self.starts[1:]):
            m = (s >= lo) & (s <= hi) if hi == self.length else (s >= lo) & (s < hi)
            if np.any(m):
                px, py = piece.point(s[m] - lo)
                x[m], y[m] = px, py
        return x, y

    def heading_at(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        h = np.zeros_like(s)
        for piece, lo, hi in zip(self.pieces, self.starts[:-1], self.starts[1:]):
            m = (s >= lo) & (s <= hi) if hi == self.length else (s >= lo) & (s < hi)
            if np.any(m):
                h[m] = piece.head(s[m] - lo)
        return h

    def project(self, x, y):
        """Arclength and distance of the closest point on the route."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        best_s = np.zeros_like(x)
        best_d = np.full_like(x, np.inf)
        for piece, lo in zip(self.pieces, self.starts[:-1]):
            s, d = piece.project(x, y)
            better = d < best_d
            best_s = np.where(better, lo + s, best_s)
            best_d = np.where(better, d, best_d)
        return best_s, best_d

    def _box_interval(self):
        s = np.arange(0.0, self.length, 0.01)
        x, y = self.point_at(s)
        inside = (np.abs(x) <= BOX_HALF) & (np.abs(y) <= BOX_HALF)
        if not np.any(inside):
            return np.inf, np.inf
        idx = np.nonzero(inside)[0]
        return float(s[idx[0]]), float(s[idx[-1]])


def _quarter_cw(cx, cy, r, phi0):
    return _Arc(cx, cy, r, phi0, -np.pi / 2)


def _quarter_ccw(cx, cy, r, phi0):
    return _Arc(cx, cy, r, phi0, np.pi / 2)


def build_routes(through_reach: float = 30.0,
                 through_tail: float = 15.0,
                 ego_approach: float = 25.0,
                 ego_tail: float = 12.0,
                 stem_tail: float = 15.0) -> dict[int, Route]:
    """Construct the five routes of the scene.

    through_reach: distance from the scene edge to the junction center for
    through traffic; through_tail: how far through traffic continues past
    the center; ego_approach: stem length ahead of the ego's turn entry.
    """
    routes = {}
    # ego: south on x=-1.5, quarter turn of radius 6, then east on y=-1.5
    routes[EGO_LEFT_TURN] = Route(EGO_LEFT_TURN, [
        _Straight(-1.5, 4.5 + (ego_approach - 1.5), -np.pi / 2, ego_approach - 1.5),
        _quarter_ccw(4.5, 4.5, 6.0, np.pi),
        _Straight(4.5, -1.5, 0.0, ego_tail),
    ])
    # eastbound through lane
    routes[LEFT_STRAIGHT] = Route(LEFT_STRAIGHT, [
        _Straight(-through_reach, -1.5, 0.0, through_reach + through_tail),
    ])
    # westbound through lane
    routes[RIGHT_STRAIGHT] = Route(RIGHT_STRAIGHT, [
        _Straight(through_reach, 1.5, np.pi, through_reach + through_tail),
    ])
    # westbound, right turn onto the stem at the near corner
    routes[RIGHT_TURN] = Route(RIGHT_TURN, [
        _Straight(through_reach, 1.5, np.pi, through_reach - 3.0),
        _quarter_cw(3.0, 3.0, 1.5, -np.pi / 2),
        _Straight(1.5, 3.0, np.pi / 2, stem_tail - 3.0),
    ])
    # eastbound, left turn onto the stem across the westbound lane; used only
    # to anticipate a signaling eastbound car, never followed by a vehicle
    routes[LEFT_TURN_HINT] = Route(LEFT_TURN_HINT, [
        _Straight(-through_reach, -1.5, 0.0, through_reach - 1.5),
        _quarter_ccw(-1.5, 1.5, 3.0, -np.pi / 2),
        _Straight(1.5, 1.5, np.pi / 2, stem_tail - 1.5),
    ])
    return routes


ROUTE_ORIGIN = {
    EGO_LEFT_TURN: ORIGIN_EGO,
    LEFT_STRAIGHT: ORIGIN_LEFT,
    LEFT_TURN_HINT: ORIGIN_LEFT,
    RIGHT_STRAIGHT: ORIGIN_RIGHT,
    RIGHT_TURN: ORIGIN_RIGHT,
}

# (straight, turn) variant an observer attributes per origin; the hint
# route exists only inside these predictions
APPARENT_VARIANTS = {
    ORIGIN_EGO: (EGO_LEFT_TURN, EGO_LEFT_TURN),
    ORIGIN_LEFT: (LEFT_STRAIGHT, LEFT_TURN_HINT),
    ORIGIN_RIGHT: (RIGHT_STRAIGHT, RIGHT_TURN),
}

# branches a vehicle can actually drive; eastbound cars have no turn
DRIVABLE_VARIANTS = {
    ORIGIN_EGO: (EGO_LEFT_TURN, EGO_LEFT_TURN),
    ORIGIN_LEFT: (LEFT_STRAIGHT, LEFT_STRAIGHT),
    ORIGIN_RIGHT: (RIGHT_STRAIGHT, RIGHT_TURN),
}


def divergence_arclength(routes: dict[int, Route], origin: int) -> float:
    """Arclength up to which the apparent straight and turn variants coincide."""
    straight, turn = APPARENT_VARIANTS[origin]
    if straight == turn:
        return np.inf
    return routes[turn].starts[1]


def rect_corners(x, y, heading, half_length, half_width):
    """Corners of oriented rectangles, shape (..., 4, 2)."""
    c, s = np.cos(heading), np.sin(heading)
    ux = np.stack([c, s], axis=-1)
    uy = np.stack([-s, c], axis=-1)
    ctr = np.stack([x, y], axis=-1)
    hl = np.asarray(half_length)[..., None]
    hw = np.asarray(half_width)[..., None]
    return np.stack([
        ctr + hl * ux + hw * uy,
        ctr + hl * ux - hw * uy,
        ctr - hl * ux - hw * uy,
        ctr - hl * ux + hw * uy,
    ], axis=-2)


def rects_overlap(xa, ya, ha, la, wa, xb, yb, hb, lb, wb):
    """Separating-axis overlap test for pairs of oriented rectangles.

    All arguments broadcast; returns a boolean array.  Touching rectangles
    count as overlapping.
    """
    xa, ya, ha = np.broadcast_arrays(xa, ya, ha)
    dx = np.asarray(xb) - xa
    dy = np.asarray(yb) - ya
    out = None
    for h_axis in (ha, np.asarray(hb)):
        for extra in (0.0, np.pi / 2):
            ax = np.cos(h_axis + extra)
            ay = np.sin(h_axis + extra)
            sep = np.abs(dx * ax + dy * ay)
            ra = (np.abs(np.cos(ha) * ax + np.sin(ha) * ay) * la
                  + np.abs(-np.sin(ha) * ax + np.cos(ha) * ay) * wa)
            rb = (np.abs(np.cos(hb) * ax + np.sin(hb) * ay) * lb
                  + np.abs(-np.sin(hb) * ax + np.cos(hb) * ay) * wb)
            hit = sep <= ra + rb
            out = hit if out is None else out & hit
    return out
