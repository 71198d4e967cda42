"""Three-level production: strong suppression above the orbit maximum.

With production

    beta_L   for x < 0,  -beta_U  for 0 <= x < xi,  -beta*  for x >= xi,

xi fixed at the orbit maximum and beta* > beta_U, the two-level periodic
solution still solves the equation (it only grazes xi). A pulse over
[z1, z1 + tau] in the rising phase pushes the state above xi; one delay
later the deep suppression -beta* drives it down, and for large enough tau
the post-pulse minimum falls strictly below the unperturbed minimum. The
four checkpoint values have closed forms:

    x(z1 + tau)   = (beta_L + a)(1 - e^-tau)
    e^{z1 - t*}   = (a + beta_L e^-tau) / (a + beta_L)     (t*: xi upcrossing)
    x(t* + tau)   = -beta_U + (x(z1 + tau) + beta_U) e^{z1 - t*}
    x(z1 + 2 tau) = -beta* + (x(t* + tau) + beta*) e^{t* - z1} e^-tau
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .engine import FeedbackTable, PulseWindow, Trajectory, evolve
from .exceptions import DomainError, NoUndershoot, RegimeError
from .orbit import PeriodicOrbit, periodic_solution
from .params import ModelParams, Regime, regime


@dataclass(frozen=True)
class ThreeLevelParams:
    """Two-level base plus the deep-suppression level beta* > beta_U.

    The upper threshold is fixed at the orbit maximum; other choices have no
    closed forms and are not supported.
    """

    base: ModelParams
    beta_star: float

    def __post_init__(self):
        if regime(self.base) is not Regime.OSCILLATORY:
            raise RegimeError("three-level extension needs the oscillatory base")
        if not self.beta_star > self.base.beta_u:
            raise DomainError(f"beta* = {self.beta_star} must exceed "
                              f"beta_U = {self.base.beta_u}")

    @property
    def xi(self) -> float:
        return periodic_solution(self.base).x_max

    def feedback(self) -> FeedbackTable:
        return FeedbackTable((0.0, self.xi),
                             (self.base.beta_l, -self.base.beta_u, -self.beta_star))


@dataclass(frozen=True)
class ThreeLevelResponse:
    x_at_z1_tau: float          # top of the boosted rise, above xi
    t_star: float               # first xi upcrossing after z1
    x_at_tstar_tau: float
    x_at_z1_2tau: float         # checkpoint that can undershoot the minimum
    xmin_base: float
    undershoot: bool

    def to_dict(self) -> dict:
        return {"x_tmax": self.x_at_z1_tau, "t_star": self.t_star,
                "x_tstar_tau": self.x_at_tstar_tau, "x_z1_2tau": self.x_at_z1_2tau,
                "xmin_base": self.xmin_base, "undershoot": self.undershoot}


def three_level_pulse(p: ThreeLevelParams, a: float) -> ThreeLevelResponse:
    """Closed-form checkpoints of the pulse (onset z1, duration tau)."""
    if not a > 0:
        raise DomainError(f"amplitude a = {a} must be > 0")
    base = p.base
    tau, bl, bu = base.tau, base.beta_l, base.beta_u
    orb = periodic_solution(base)
    em = -math.expm1(-tau)                      # 1 - e^-tau
    x_top = (bl + a) * em
    q = (a + bl * math.exp(-tau)) / (a + bl)    # e^{z1 - t*}
    t_star = orb.z1 - math.log(q)
    x_mid = -bu + (x_top + bu) * q
    x_deep = -p.beta_star + (x_mid + p.beta_star) * math.exp(-tau) / q
    return ThreeLevelResponse(x_at_z1_tau=x_top, t_star=t_star,
                              x_at_tstar_tau=x_mid, x_at_z1_2tau=x_deep,
                              xmin_base=orb.x_min,
                              undershoot=x_deep < orb.x_min)


def simulate_pulse(p: ThreeLevelParams, a: float,
                   horizon: Optional[float] = None) -> tuple[Trajectory, PeriodicOrbit]:
    """Event-driven run of the three-level system with the section's pulse."""
    orb = periodic_solution(p.base)
    tau = p.base.tau
    if horizon is None:
        horizon = orb.z1 + 2 * tau + orb.period
    traj = evolve(p.base, orb.history_min_phase(), horizon,
                  pulse=PulseWindow(a, orb.z1, orb.z1 + tau),
                  feedback=p.feedback())
    return traj, orb


def _undershoot_gap(p: ThreeLevelParams, a: float, tau: float) -> float:
    trial = ThreeLevelParams(ModelParams(tau, p.base.beta_l, p.base.beta_u),
                             p.beta_star)
    r = three_level_pulse(trial, a)
    return r.x_at_z1_2tau - r.xmin_base


def undershoot_threshold(p: ThreeLevelParams, a: float,
                         bracket: tuple[float, float] = (1e-3, 1e3),
                         tol: float = 1e-6) -> float:
    """Smallest tau at which x(z1 + 2 tau) drops below the cycle minimum.

    Scans a log grid for the first sign change of the gap, then bisects it
    to ``tol``. Raises NoUndershoot when the gap never changes sign on the
    bracket (not expected while beta* > beta_U).
    """
    if not a > 0:
        raise DomainError(f"amplitude a = {a} must be > 0")
    lo, hi = bracket
    n = 512
    taus = [lo * (hi / lo) ** (i / (n - 1)) for i in range(n)]
    g_prev = _undershoot_gap(p, a, taus[0])
    span = None
    for tau in taus[1:]:
        g = _undershoot_gap(p, a, tau)
        if g_prev >= 0 > g:
            span = (taus[taus.index(tau) - 1], tau)
            break
        g_prev = g
    if span is None:
        raise NoUndershoot(f"no sign change of the undershoot gap on {bracket}")
    t_lo, t_hi = span
    while t_hi - t_lo > tol:
        mid = 0.5 * (t_lo + t_hi)
        if _undershoot_gap(p, a, mid) >= 0:
            t_lo = mid
        else:
            t_hi = mid
    return 0.5 * (t_lo + t_hi)
