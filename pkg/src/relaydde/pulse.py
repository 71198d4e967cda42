"""Response of the periodic solution to a single production pulse.

A pulse (amplitude a, onset Delta in [0, T), duration sigma <= tau) deforms
one cycle of the orbit. The onset/offset position relative to the rising and
falling phases and the solution sign there sort every pulse into one of ten
cases (RNRN ... FNRP; an eleventh, FNFP, exists only when a >= beta_U).
Each case has a closed-form cycle length and closed-form extrema; the same
quantities are also measured from an event-driven simulation, which is the
route of record when the standing hypothesis a < beta_U fails.

All case formulas evaluate exponentials of bounded time differences
(exp-space zero identities), finishing with a single logarithm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .engine import PulseWindow, Trajectory, evolve
from .exceptions import (OutOfDomainError, RegimeError, StandingHypothesisViolated,
                         ValidationError)
from .orbit import MergePhase, PeriodicOrbit, merge_time, merge_window, periodic_solution
from .params import ModelParams, PulseSpec, Regime, check_pulse, regime


class CaseCode(enum.Enum):
    """Four letters: phase (R/F) and sign (N/P) at onset, then at offset."""

    RNRN = "RNRN"
    RNRP = "RNRP"
    RPRP = "RPRP"
    RPFP = "RPFP"
    RPFN = "RPFN"
    FPFP = "FPFP"
    FPFN = "FPFN"
    FNFN = "FNFN"
    FNFP = "FNFP"   # only reachable when a >= beta_U (relaxed mode)
    FNRN = "FNRN"
    FNRP = "FNRP"


@dataclass(frozen=True)
class Case:
    code: CaseCode
    #: RNRP splits at delta1_hat into RNRP1 (offset value <= beta_L) / RNRP2
    sub: Optional[str] = None


@dataclass(frozen=True)
class Thresholds:
    """Onset thresholds separating the cases (times; may fall outside [0, T))."""

    delta1: float
    delta1_hat: float
    delta2: float
    delta_bar: float
    #: relaxed mode only: delta2 >= z2 (cases FNFP possible); delta2 may be inf
    delta2_relaxed: bool = False


@dataclass(frozen=True)
class CycleStats:
    """Measured or closed-form response of one pulsed cycle."""

    case: Case
    T: float                   # cycle length; math.inf when no merge occurs
    x_min: float
    x_max: float
    J: int                     # j_Delta: index of the last orbit zero <= Delta
    zeros: tuple[float, ...]   # the zeros z_{Delta,j} entering the formulas
    diagnostics: Optional[dict] = field(default=None, compare=False)

    def to_dict(self, delta: float) -> dict:
        return {"delta": delta, "case": self.case.code.value,
                "sub": self.case.sub, "T": self.T, "xmin": self.x_min,
                "xmax": self.x_max, "J": self.J, "zeros": list(self.zeros)}


def _require_oscillatory(params: ModelParams) -> PeriodicOrbit:
    if regime(params) is not Regime.OSCILLATORY:
        raise RegimeError(f"pulse analysis needs the oscillatory regime, "
                          f"got {regime(params).value}")
    return periodic_solution(params)


def thresholds(params: ModelParams, a: float, sigma: float) -> Thresholds:
    """The four onset thresholds delta1, delta1_hat, delta2, delta_bar."""
    if not a > 0:
        raise ValidationError("amp_positive", f"a = {a} must be > 0")
    if not 0 < sigma <= params.tau:
        raise ValidationError("sigma_le_tau", f"need 0 < sigma <= tau, got {sigma}")
    orb = _require_oscillatory(params)
    bl, bu, tau = params.beta_l, params.beta_u, params.tau
    gain = a * -math.expm1(-sigma)            # a(1 - e^-sigma)
    d1 = orb.z1 - sigma - math.log((bl + gain) / bl)
    d1_hat = orb.z1 - sigma + math.log(bl / gain)
    if gain < bu:
        d2 = orb.z2 - sigma + math.log(bu / (bu - gain))
    else:
        d2 = math.inf                          # offset value never negative
    d_bar = orb.period - math.log(
        0.5 + math.sqrt(0.25 + a * math.expm1(sigma) * math.exp(tau) / bu))
    return Thresholds(delta1=d1, delta1_hat=d1_hat, delta2=d2, delta_bar=d_bar,
                      delta2_relaxed=not d2 < orb.z2)


def classify(params: ModelParams, pulse: PulseSpec) -> Case:
    """The unique case whose onset interval contains pulse.delta.

    Interval endpoints follow the case definitions exactly: [0, delta1) is
    RNRN when delta1 > 0; [max(0, delta1), z1) RNRP; [z1, tmax - sigma] RPRP;
    (tmax - sigma, tmax) RPF{P:delta <= delta2, N:else}; [tmax, z2] FPF*;
    (z2, T - sigma) FNF*; [T - sigma, T) FNR{N:delta < T + delta1, P:else}.
    The onset t_max itself is in the falling phase.
    """
    check_pulse(params, pulse)
    orb = _require_oscillatory(params)
    th = thresholds(params, pulse.a, pulse.sigma)
    d, sigma = pulse.delta, pulse.sigma
    if not 0 <= d < orb.period:
        raise OutOfDomainError(f"delta = {d} outside [0, T = {orb.period})")
    t_max = orb.t_max
    if d < t_max:
        if d < orb.z1:
            if th.delta1 > 0 and d < th.delta1:
                return Case(CaseCode.RNRN)
            sub = "RNRP1" if d <= th.delta1_hat else "RNRP2"
            return Case(CaseCode.RNRP, sub)
        if d <= t_max - sigma:
            return Case(CaseCode.RPRP)
        return Case(CaseCode.RPFP if d <= th.delta2 else CaseCode.RPFN)
    if d <= orb.z2:
        return Case(CaseCode.FPFP if d <= th.delta2 else CaseCode.FPFN)
    if d < orb.period - sigma:
        return Case(CaseCode.FNFN if d > th.delta2 else CaseCode.FNFP)
    return Case(CaseCode.FNRN if d < orb.period + th.delta1 else CaseCode.FNRP)


def _j_delta(orb: PeriodicOrbit, delta: float) -> int:
    if delta >= orb.z2:
        return 2
    if delta >= orb.z1:
        return 1
    return 0


def case_cycle_length(params: ModelParams, a: float, sigma: float,
                      delta: float, code: CaseCode) -> float:
    """T(Delta) by the named case's formula, without classifying.

    Adjacent case formulas agree at their shared onset threshold; this
    entry point lets callers check exactly that.
    """
    orb = _require_oscillatory(params)
    bl, bu, tau = params.beta_l, params.beta_u, params.tau
    z1, z2, T = orb.z1, orb.z2, orb.period
    es = a * math.expm1(sigma)
    if code is CaseCode.RNRN:
        return T + math.log1p(-es / bl * math.exp(delta - z1))
    if code is CaseCode.RNRP:
        return T + math.log1p(
            es / bu * math.exp(delta - z2)
            + a * (bl + bu) * math.exp(tau + z1 - z2) / (bu * (bl + a))
            * math.expm1(delta - z1))
    if code in (CaseCode.RPRP, CaseCode.RPFP, CaseCode.FPFP):
        return T + math.log1p(es / bu * math.exp(delta - z2))
    if code in (CaseCode.RPFN, CaseCode.FPFN):
        return T + math.log1p(
            -es / bl * math.exp(delta - z1 - T)
            - a * (bl + bu) * math.exp(-z1) / (bl * (bu - a)) * math.expm1(delta - z2))
    if code in (CaseCode.FNFN, CaseCode.FNRN):
        return T + math.log1p(-es / bl * math.exp(delta - z1 - T))
    if code is CaseCode.FNRP:
        return T + math.log1p(
            es / bu * math.exp(delta - z2 - T)
            + a * (bl + bu) * math.exp(tau + z1 - z2) / (bu * (bl + a))
            * math.expm1(delta - z1 - T))
    raise StandingHypothesisViolated(f"no closed form for case {code.value}")


def response_closed_form(params: ModelParams, pulse: PulseSpec) -> CycleStats:
    """Cycle length and extrema from the per-case formulas.

    Valid only under the standing hypothesis a < beta_U; raises
    StandingHypothesisViolated otherwise (use response_simulated there).
    """
    check_pulse(params, pulse)
    if not pulse.a < params.beta_u:
        raise StandingHypothesisViolated(
            f"closed forms need a < beta_U (a = {pulse.a}, beta_U = {params.beta_u})")
    orb = _require_oscillatory(params)
    case = classify(params, pulse)
    bl, bu, tau = params.beta_l, params.beta_u, params.tau
    a, sigma, d = pulse.a, pulse.sigma, pulse.delta
    z1, z2, T, t_max = orb.z1, orb.z2, orb.period, orb.t_max
    x_min, x_max = orb.x_min, orb.x_max
    es = a * math.expm1(sigma)                 # a(e^sigma - 1)
    gain = a * -math.expm1(-sigma)             # a(1 - e^-sigma)
    J = _j_delta(orb, d)
    code = case.code

    T_d = case_cycle_length(params, a, sigma, d, code)

    if code is CaseCode.RNRN:
        return CycleStats(case, T_d, x_min, x_max, J, (z1 + (T_d - T),))

    if code is CaseCode.RNRP:
        zd1 = z1 + math.log((bl + a * math.exp(d - z1)) / (bl + a))
        x_off = bl - bl * math.exp(z1 - d - sigma) + gain
        x_after = bl - (bl + a) * math.exp(-tau) + a * math.exp(-tau + sigma + d - zd1)
        return CycleStats(case, T_d, x_min, max(x_off, x_after), J, (zd1, z2 + (T_d - T)))

    if code in (CaseCode.RPRP, CaseCode.RPFP, CaseCode.FPFP):
        if code is CaseCode.RPRP:
            x_off = bl - bl * math.exp(z1 - d - sigma) + gain
            x_at_tmax = x_max + es * math.exp(d - t_max)
            x_mx = max(x_off, x_at_tmax)
        elif code is CaseCode.RPFP:
            x_mx = x_max + a * -math.expm1(d - t_max)
        else:
            x_mx = x_max
        return CycleStats(case, T_d, x_min, x_mx, J, (z1, z2 + (T_d - T)))

    if code in (CaseCode.RPFN, CaseCode.FPFN):
        zd2 = z2 + math.log((bu - a * math.exp(d - z2)) / (bu - a))
        x_mn = x_min + a * math.exp(-tau) * math.expm1(d + sigma - zd2)
        x_mx = x_max + a * -math.expm1(d - t_max) if code is CaseCode.RPFN else x_max
        return CycleStats(case, T_d, x_mn, x_mx, J, (z1, zd2, z1 + T_d))

    if code in (CaseCode.FNFN, CaseCode.FNRN):
        x_on = -bu + bu * math.exp(z2 - d)     # still on the orbit at onset
        if code is CaseCode.FNFN:
            x_at_T = x_min + es * math.exp(d - T)
        else:
            x_at_T = x_min + a * -math.expm1(d - T)
        return CycleStats(case, T_d, min(x_on, x_at_T), x_max, J, (z1 + T_d,))

    # FNRP (case_cycle_length has already rejected FNFP)
    zd3 = z1 + T + math.log((bl + a * math.exp(d - z1 - T)) / (bl + a))
    x_on = -bu + bu * math.exp(z2 - d)
    x_at_T = x_min + a * -math.expm1(d - T)
    # the maximum candidates mirror RNRP: one delay after the re-zero, or the
    # pulse end when the offset value overshoots beta_L
    x_after = x_max + a * math.exp(-tau) * math.expm1(sigma + d - zd3)
    x_off = bl - bl * math.exp(z1 - (d + sigma - T)) + gain
    return CycleStats(case, T_d, min(x_on, x_at_T), max(x_after, x_off), J,
                      (zd3, z2 + T_d))


def pulsed_trajectory(params: ModelParams, pulse: PulseSpec,
                      horizon: Optional[float] = None) -> tuple[Trajectory, PeriodicOrbit]:
    """The pulsed solution x^(Delta): orbit history, pulse on [Delta, Delta+sigma]."""
    check_pulse(params, pulse)
    orb = _require_oscillatory(params)
    if not 0 <= pulse.delta < orb.period:
        raise OutOfDomainError(f"delta = {pulse.delta} outside [0, T = {orb.period})")
    if horizon is None:
        horizon = pulse.delta + pulse.sigma + merge_window(orb) + orb.period
    window = PulseWindow(pulse.a, pulse.delta, pulse.delta + pulse.sigma)
    traj = evolve(params, orb.history_min_phase(), horizon, pulse=window)
    return traj, orb


_PHASE_OF_ZERO = {0: MergePhase.MIN, 1: MergePhase.MAX, 2: MergePhase.MIN}


def response_simulated(params: ModelParams, pulse: PulseSpec) -> CycleStats:
    """Cycle length and extrema measured from an event-driven run.

    Works in relaxed mode too; reports T = inf with diagnostics when the
    solution never rejoins the orbit before the guaranteed merge window
    (possible only for a >= beta_U).
    """
    traj, orb = pulsed_trajectory(params, pulse)
    case = classify(params, pulse)
    d = pulse.delta
    J = _j_delta(orb, d)
    orbit_zeros = (-params.tau, orb.z1, orb.z2)

    merged = merge_time(traj, orb, t_free=d + pulse.sigma)
    if merged is None:
        zs = tuple(z.t for z in traj.zeros)
        return CycleStats(case, math.inf, math.nan, math.nan, J, zs,
                          diagnostics={"zeros_seen": list(zs), "horizon": traj.horizon})

    # first merge zero of the same phase as the reference zero z~_J; if the
    # pulse sits exactly on an orbit zero the solution may rejoin half a swing
    # early, in the opposite phase (then z~_{J-1} is the matching reference)
    if merged.phase is _PHASE_OF_ZERO[J]:
        z_def = merged.zero
    else:
        gap = orb.z1 - (-params.tau) if J == 1 else orb.z2 - orb.z1
        z_def = merged.zero + gap
    T_d = z_def - orbit_zeros[J]
    lo = orbit_zeros[J]
    x_mn, x_mx = traj.breakpoint_extrema(lo, min(z_def, traj.horizon))
    zs = tuple(z.t for z in traj.zeros if lo < z.t <= z_def + 1e-12)
    return CycleStats(case, T_d, x_mn, x_mx, J, zs)
