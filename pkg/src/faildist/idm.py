"""Intelligent-driver-model acceleration law.

Car-following acceleration toward a leader at a given bumper gap; the same
closed form also serves for braking toward a virtual stopped obstacle at a
junction entry.  Output is clamped to [-2*b_comf, a_max].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IdmParams:
    v_desired: float = 29.0
    s_min: float = 5.0
    a_max: float = 3.0
    b_comf: float = 2.0
    t_headway: float = 1.5
    delta_exponent: float = 4.0

    def __post_init__(self):
        for name in ("v_desired", "s_min", "a_max", "b_comf", "t_headway",
                     "delta_exponent"):
            if getattr(self, name) <= 0:
                raise ValueError(f"IdmParams.{name} must be positive")

    @property
    def b_hard(self) -> float:
        return 2.0 * self.b_comf


def idm_acceleration(gap: float, v: float, v_lead: float,
                     params: IdmParams) -> float:
    """Acceleration for speed v with a leader at bumper gap driving v_lead.

    gap = inf means a free road (v_lead is ignored).  A non-positive gap
    with a leader present signals overlapping vehicles and is an error.
    """
    if v < 0:
        raise ValueError("vehicle speed must be nonnegative")
    if gap <= 0:
        raise ValueError(f"non-positive gap {gap} with a leader present")
    return float(idm_acceleration_arr(np.asarray(gap, dtype=float),
                                      np.asarray(v, dtype=float),
                                      np.asarray(v_lead, dtype=float),
                                      params))


def idm_acceleration_arr(gap, v, v_lead, params: IdmParams):
    """Vectorized form; gaps must be positive or inf."""
    s_star = (params.s_min + v * params.t_headway
              + v * (v - v_lead) / (2.0 * np.sqrt(params.a_max * params.b_comf)))
    with np.errstate(divide="ignore", invalid="ignore"):
        interaction = np.where(np.isinf(gap), 0.0, (s_star / gap) ** 2)
    a = params.a_max * (1.0 - (v / params.v_desired) ** params.delta_exponent
                        - interaction)
    return np.clip(a, -params.b_hard, params.a_max)
