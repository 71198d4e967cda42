"""Event-driven method-of-steps solver with exact exponential arcs.

On every maximal interval where the delayed feedback branch and the pulse
state are constant, the solution is a single arc c + k*exp(-(t - t0)) with

    c = feedback level (+ pulse amplitude inside the pulse window).

The engine advances from event to event: feedback switches at (crossing
time + tau), pulse edges, and the horizon. Threshold crossings of emitted
arcs are located analytically and schedule future switches; nothing is ever
integrated numerically here.

The feedback rule is an ordered threshold -> level table; the two-level
model is the special case with the single threshold 0.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .arcs import ExpArc, History, _branch_after, _tie, chain_values
from .exceptions import ValidationError
from .params import ModelParams


@dataclass(frozen=True)
class FeedbackTable:
    """Ordered feedback rule: levels[b] applies when the delayed value sits in
    [thresholds[b-1], thresholds[b]), with open ends at +-infinity."""

    thresholds: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.levels) != len(self.thresholds) + 1:
            raise ValidationError("feedback_shape", "need one more level than thresholds")
        if any(lo >= hi for lo, hi in zip(self.thresholds, self.thresholds[1:])):
            raise ValidationError("feedback_order", "thresholds must be strictly increasing")

    @staticmethod
    def two_level(params: ModelParams) -> "FeedbackTable":
        return FeedbackTable((0.0,), (params.beta_l, -params.beta_u))


@dataclass(frozen=True)
class PulseWindow:
    """Additive feedback offset a on the absolute time window [t_on, t_off]."""

    a: float
    t_on: float
    t_off: float

    def __post_init__(self):
        if not self.t_on < self.t_off:
            raise ValidationError("pulse_window", f"need t_on < t_off, got [{self.t_on}, {self.t_off}]")


@dataclass(frozen=True)
class Zero:
    """A transversal zero of the solution: time and crossing direction."""

    t: float
    up: bool


@dataclass(frozen=True)
class Trajectory:
    """Solution on [0, horizon] as an exact arc chain, plus its history."""

    params: ModelParams
    history: History
    arcs: tuple[ExpArc, ...]
    zeros: tuple[Zero, ...]
    #: crossings of every feedback threshold: (time, threshold index, upward)
    crossings: tuple[tuple[float, int, bool], ...] = field(repr=False, default=())

    @property
    def horizon(self) -> float:
        return self.arcs[-1].t_end

    def value(self, t: float) -> float:
        if t <= 0:
            return self.history.value(t)
        for arc in self.arcs:
            if arc.t_start <= t <= arc.t_end:
                return arc.value(t)
        raise ValidationError("traj_domain", f"t = {t} beyond horizon {self.horizon}")

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at sorted times within [-tau, horizon]."""
        t = np.asarray(times, dtype=float)
        out = np.empty_like(t)
        neg = t <= 0
        if neg.any():
            out[neg] = self.history.values(t[neg])
        if (~neg).any():
            out[~neg] = chain_values(self.arcs, t[~neg])
        return out

    def segment_at(self, t: float) -> History:
        """The state x_t as a history on [-tau, 0] (shifted arc chain)."""
        tau = self.params.tau
        if not 0 <= t <= self.horizon:
            raise ValidationError("traj_domain", f"segment time {t} outside [0, horizon]")
        lo, hi = t - tau, t
        pieces: list[ExpArc] = []
        for arc in list(self.history.arcs) + list(self.arcs):
            a0, a1 = max(arc.t_start, lo), min(arc.t_end, hi)
            if a1 - a0 > _tie(a1):
                pieces.append(ExpArc(a0 - t, a1 - t, arc.c,
                                     arc.k * math.exp(-(a0 - arc.t_start))))
        return History(tuple(pieces))

    def breakpoint_extrema(self, lo: float, hi: float) -> tuple[float, float]:
        """(min, max) of the solution over [lo, hi]; arcs are monotone, so the
        extrema sit at arc endpoints clipped to the window."""
        vals = [self.value(lo), self.value(hi)]
        for arc in list(self.history.arcs) + list(self.arcs):
            for tt in (arc.t_start, arc.t_end):
                if lo <= tt <= hi:
                    vals.append(arc.value(tt))
        return min(vals), max(vals)

    def csv_rows(self, n: int) -> Iterable[tuple[float, float]]:
        ts = np.linspace(-self.params.tau, self.horizon, n)
        xs = self.sample(ts)
        return zip(ts.tolist(), xs.tolist())

    def arcs_json(self) -> str:
        """Arc chain as JSON; plain repr floats round-trip exactly."""
        return json.dumps([{"t_start": a.t_start, "t_end": a.t_end, "c": a.c, "k": a.k}
                           for a in self.arcs])

    @staticmethod
    def arcs_from_json(text: str) -> tuple[ExpArc, ...]:
        return tuple(ExpArc(d["t_start"], d["t_end"], d["c"], d["k"])
                     for d in json.loads(text))


def _on_threshold(v: float, th: float) -> bool:
    return abs(v - th) <= 1e-12 * max(1.0, abs(v), abs(th))


class _Run:
    """Mutable bookkeeping for one evolve() call."""

    def __init__(self, fb: FeedbackTable, tau: float):
        self.fb = fb
        self.tau = tau
        self.events: list[tuple[float, int, int]] = []   # (time, priority, branch | -1)
        self.zeros: list[Zero] = []
        self.crossings: list[tuple[float, int, bool]] = []
        self.last_seen: dict[int, float] = {}            # threshold -> last crossing time

    def push_edge(self, t: float) -> None:
        heapq.heappush(self.events, (t, 0, -1))

    def push_switch(self, t: float, branch: int) -> None:
        heapq.heappush(self.events, (t, 1, branch))

    def seen(self, s: float, i: int) -> bool:
        return s - self.last_seen.get(i, -math.inf) <= 2 * _tie(s)

    def book(self, s: float, i: int, up: bool) -> None:
        self.last_seen[i] = s
        self.crossings.append((s, i, up))
        if self.fb.thresholds[i] == 0.0 and s > _tie(1.0):
            self.zeros.append(Zero(s, up))
        after = i + 1 if up else i
        self.push_switch(s + self.tau, after)


def evolve(params: ModelParams, history: History, horizon: float,
           pulse: Optional[PulseWindow] = None,
           feedback: Optional[FeedbackTable] = None) -> Trajectory:
    """Solve forward from the history for ``horizon`` time units.

    The pulse, when present, adds ``pulse.a`` to the feedback term exactly on
    [t_on, t_off]. Ties between events closer than the tie tolerance are
    processed together, pulse edges first; a crossing landing exactly on a
    segment end is only booked once the next arc confirms the threshold is
    actually crossed, so grazing contact schedules no feedback switch.
    """
    if not horizon > 0:
        raise ValidationError("horizon_positive", f"horizon = {horizon} must be > 0")
    if abs(history.tau - params.tau) > _tie(params.tau):
        raise ValidationError("history_tau", f"history spans tau = {history.tau}, "
                                             f"params say {params.tau}")
    fb = feedback if feedback is not None else FeedbackTable.two_level(params)
    thresholds = fb.thresholds
    tau = params.tau
    run = _Run(fb, tau)

    if pulse is not None:
        run.push_edge(pulse.t_on)
        run.push_edge(pulse.t_off)
    branch = history.initial_branch(thresholds)
    for tm, b in history.branch_markers(thresholds):
        run.push_switch(tm + tau, b)

    t, x = 0.0, history.value(0.0)
    arcs: list[ExpArc] = []
    # pending grazing contact: (time, threshold index, value-branch before)
    touch: Optional[tuple[float, int, int]] = None
    last = history.arcs[-1]
    for i, th in enumerate(thresholds):
        if _on_threshold(x, th):
            touch = (0.0, i, i if last.k < 0 else (i + 1 if last.k > 0 else
                                                   _branch_after(th, 0.0, thresholds)))
            break

    while t < horizon - _tie(horizon):
        while run.events and run.events[0][0] <= t + _tie(t):
            _, _, b = heapq.heappop(run.events)
            if b >= 0:
                branch = b
        level = fb.levels[branch]
        if pulse is not None and pulse.t_on - _tie(t) <= t < pulse.t_off - _tie(t):
            level += pulse.a
        seg_end = min(run.events[0][0], horizon) if run.events else horizon
        probe = ExpArc(t, seg_end + 1.0, level, x - level)

        if touch is not None:
            t0, ti, before = touch
            after = _branch_after(thresholds[ti], -probe.k, thresholds)
            if after != before:
                run.book(t0, ti, up=after > before)
                seg_end = min(seg_end, t0 + tau)
            else:
                run.last_seen[ti] = t0   # grazing contact: suppress re-detection
            touch = None

        lo = t
        while True:
            nxt = None
            for i, th in enumerate(thresholds):
                s = probe.crossing(th, lo, seg_end, lo_guard=False)
                if s is not None and not run.seen(s, i) \
                        and (nxt is None or s < nxt[0]):
                    nxt = (s, i)
            if nxt is None:
                break
            s1, i1 = nxt
            if s1 >= seg_end - _tie(seg_end):
                touch = (seg_end, i1, i1 if probe.k < 0 else i1 + 1)
                break
            run.book(s1, i1, up=probe.rising)
            seg_end = min(seg_end, s1 + tau)
            lo = s1

        arcs.append(ExpArc(t, seg_end, level, x - level))
        x = arcs[-1].end_value
        t = seg_end

    run.zeros.sort(key=lambda z: z.t)
    return Trajectory(params=params, history=history, arcs=tuple(arcs),
                      zeros=tuple(run.zeros), crossings=tuple(sorted(run.crossings)))


def zeros_of(traj: Trajectory) -> list[Zero]:
    """Recorded transversal zeros, strictly increasing."""
    return list(traj.zeros)
