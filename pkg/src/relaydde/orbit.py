"""Closed-form periodic solution and orbit-merge detection.

In the oscillatory regime (beta_L, beta_U > 0) the slowly oscillating
periodic solution has minimum at t = 0 and consists of three arcs:

    [-tau, 0]            x = -beta_U + beta_U * exp(-(t + tau))   (fall to min)
    [0, z1 + tau]        x = beta_L + (xmin - beta_L) * exp(-t)   (rise to max)
    [z1 + tau, z2 + tau] x = -beta_U + (xmax + beta_U) * exp(-(t - z1 - tau))

with

    xmin = -beta_U*(1 - e^-tau),  xmax = beta_L*(1 - e^-tau),
    z1 = ln((beta_L - xmin)/beta_L),  z2 = z1 + tau + ln((xmax + beta_U)/beta_U),
    T = z2 + tau  (minimal period).

Every solution from a Z0 history lands exactly on this orbit at its first
zero, in one of two phases: decreasing toward the minimum (Min) or rising
toward the maximum (Max).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arcs import ExpArc, History, _tie, chains_equal
from .engine import Trajectory
from .exceptions import HorizonExhausted, RegimeError
from .params import ModelParams, Regime, regime


class MergePhase(enum.Enum):
    MIN = "min"   # joined at a downward zero, heading to the minimum
    MAX = "max"   # joined at an upward zero, heading to the maximum


@dataclass(frozen=True)
class MergeInfo:
    zero: float
    phase: MergePhase


@dataclass(frozen=True)
class PeriodicOrbit:
    """Closed-form data of the slowly oscillating periodic solution."""

    params: ModelParams
    z1: float
    z2: float
    period: float
    x_min: float
    x_max: float
    arcs: tuple[ExpArc, ...]   # the pieces on [-tau, 0], [0, z1+tau], [z1+tau, T]

    @property
    def t_max(self) -> float:
        return self.z1 + self.params.tau

    @property
    def t_min(self) -> float:
        return 0.0

    def value(self, t: float) -> float:
        """x~ at any time (reduced mod the period into [-tau, z2 + tau))."""
        tau = self.params.tau
        s = math.fmod(t + tau, self.period)
        if s < 0:
            s += self.period
        s -= tau
        for arc in self.arcs:
            if arc.t_start <= s <= arc.t_end:
                return arc.value(s)
        return self.arcs[-1].value(s)

    def sample(self, times: np.ndarray) -> np.ndarray:
        return np.array([self.value(t) for t in np.asarray(times, dtype=float)])

    def zeros_in(self, lo: float, hi: float) -> list[float]:
        """Orbit zeros (z1 + nT and z2 + nT alike) inside [lo, hi]."""
        out = []
        n = math.floor((lo - self.z2) / self.period)
        while True:
            block = [self.z1 + n * self.period, self.z2 + n * self.period]
            if all(z > hi for z in block):
                break
            out.extend(z for z in block if lo <= z <= hi)
            n += 1
        return out

    def history_min_phase(self) -> History:
        """The segment x~_0: falling through zero at -tau down to the minimum."""
        tau = self.params.tau
        return History((ExpArc(-tau, 0.0, -self.params.beta_u, self.params.beta_u),))

    def history_pre_max(self) -> History:
        """The rising segment ending at the maximum: x~(z1 + tau + s), s in [-tau, 0]."""
        tau = self.params.tau
        return History((ExpArc(-tau, 0.0, self.params.beta_l, -self.params.beta_l),))

    def summary(self) -> dict:
        return {"z1": self.z1, "z2": self.z2, "T": self.period,
                "xmin": self.x_min, "xmax": self.x_max, "tmax": self.t_max}


def periodic_solution(params: ModelParams) -> PeriodicOrbit:
    """The slowly oscillating periodic solution; RegimeError outside oscillatory."""
    if regime(params) is not Regime.OSCILLATORY:
        raise RegimeError(f"no periodic orbit in regime {regime(params).value}")
    tau, bl, bu = params.tau, params.beta_l, params.beta_u
    em = -math.expm1(-tau)            # 1 - e^-tau
    x_min = -bu * em
    x_max = bl * em
    z1 = math.log((bl - x_min) / bl)
    z2 = z1 + tau + math.log((x_max + bu) / bu)
    period = z2 + tau
    arcs = (
        ExpArc(-tau, 0.0, -bu, bu),
        ExpArc(0.0, z1 + tau, bl, x_min - bl),
        ExpArc(z1 + tau, period, -bu, x_max + bu),
    )
    return PeriodicOrbit(params=params, z1=z1, z2=z2, period=period,
                         x_min=x_min, x_max=x_max, arcs=arcs)


def _expected_arcs(orbit: PeriodicOrbit, z: float, phase: MergePhase) -> tuple[ExpArc, ExpArc]:
    """The two orbit arcs following a merge zero at z, translated to z."""
    p = orbit.params
    tau = p.tau
    if phase is MergePhase.MIN:
        first = ExpArc(z, z + tau, -p.beta_u, p.beta_u)
        second = ExpArc(z + tau, z + tau + orbit.z1 + tau, p.beta_l, orbit.x_min - p.beta_l)
    else:
        first = ExpArc(z, z + tau, p.beta_l, -p.beta_l)
        second = ExpArc(z + tau, z + orbit.z2 - orbit.z1 + tau, -p.beta_u,
                        orbit.x_max + p.beta_u)
    return first, second


def merge_window(orbit: PeriodicOrbit) -> float:
    """Length of the window within which any Z0 start is guaranteed merged.

    Generous version of the T + 2*tau + 2*rho stability bound: rho exists but
    never needs to be computed, T covers it.
    """
    return orbit.period + 2 * orbit.params.tau + orbit.period


def merge_time(traj: Trajectory, orbit: PeriodicOrbit,
               t_free: float = 0.0) -> Optional[MergeInfo]:
    """Earliest zero z >= t_free where the trajectory joins the orbit.

    The join is validated exactly: the two arcs following z must equal the
    orbit arcs (translated to z) within 1e-10 in (c, k) data. Matching on a
    full delay interval pins the state onto the orbit, so the check is
    conclusive. Returns None when the trajectory provably has no merge zero
    before the horizon; raises HorizonExhausted when the horizon is too short
    to decide.
    """
    tau = orbit.params.tau
    chain = list(traj.history.arcs) + list(traj.arcs)
    undecided = False
    for zero in traj.zeros:
        if zero.t < t_free - _tie(t_free):
            continue
        phase = MergePhase.MAX if zero.up else MergePhase.MIN
        first, second = _expected_arcs(orbit, zero.t, phase)
        window_end = min(second.t_end, zero.t + 2 * tau)
        if window_end > traj.horizon + _tie(window_end):
            undecided = True
            break
        if chains_equal(chain, [first, second], zero.t, window_end, tol=1e-10):
            return MergeInfo(zero=zero.t, phase=phase)
    if undecided or traj.horizon < t_free + merge_window(orbit):
        raise HorizonExhausted(
            f"horizon {traj.horizon} too short to decide merge after t = {t_free}")
    return None
