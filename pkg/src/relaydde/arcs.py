"""Exponential arcs and arc-chain histories.

Every solution piece of the model has the shape

    x(t) = c + k * exp(-(t - t_start))        on [t_start, t_end],

the general solution of x' = -x + c. Solutions and admissible histories are
chains of such arcs; sampling is only ever a view of this exact form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .exceptions import IdenticallyZeroHistory, NonTransversalArc, ValidationError

#: zeros/events closer than TIE_EPS*max(1,|t|) are treated as coincident
TIE_EPS = 1e-13


def _tie(t: float) -> float:
    return TIE_EPS * max(1.0, abs(t))


@dataclass(frozen=True)
class ExpArc:
    """One solution piece x(t) = c + k*exp(-(t - t_start)) on [t_start, t_end]."""

    t_start: float
    t_end: float
    c: float
    k: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValidationError("arc_span", f"need t_end > t_start, got [{self.t_start}, {self.t_end}]")

    def value(self, t: float) -> float:
        return self.c + self.k * math.exp(-(t - self.t_start))

    def values(self, t: np.ndarray) -> np.ndarray:
        return self.c + self.k * np.exp(-(t - self.t_start))

    @property
    def start_value(self) -> float:
        return self.c + self.k

    @property
    def end_value(self) -> float:
        return self.value(self.t_end)

    def slope(self, t: float) -> float:
        return -self.k * math.exp(-(t - self.t_start))

    @property
    def rising(self) -> bool:
        return self.k < 0

    def crossing(self, level: float = 0.0, lo: Optional[float] = None,
                 hi: Optional[float] = None, lo_guard: bool = True) -> Optional[float]:
        """Time in (lo, hi] where the arc crosses ``level``, else None.

        Bounds default to the arc span. Crossings within the tie tolerance of
        ``hi`` snap to ``hi``. With ``lo_guard`` (the default) crossings within
        tolerance of ``lo`` are excluded as belonging to the preceding piece;
        the solver passes lo_guard=False and deduplicates against already-seen
        crossings itself, so a genuine crossing just past a segment boundary
        is not lost. Raises NonTransversalArc for the identically-zero arc
        when asked for level 0.
        """
        lo = self.t_start if lo is None else lo
        hi = self.t_end if hi is None else hi
        ceff = self.c - level
        if ceff == 0.0:
            if self.k == 0.0:
                if level == 0.0:
                    raise NonTransversalArc("arc is identically zero")
                return None
            return None  # approaches the level asymptotically, never attains it
        r = -self.k / ceff
        if r <= 0.0:
            return None
        t = self.t_start + math.log(r)
        if abs(t - hi) <= _tie(hi):
            t = hi
        if t > hi or (t <= lo + _tie(lo) if lo_guard else t <= lo):
            return None
        return t


def arc_zero(arc: ExpArc) -> Optional[float]:
    """First zero of the arc strictly inside (t_start, t_end], else None."""
    return arc.crossing(0.0)


def chain_value(arcs: Iterable[ExpArc], t: float) -> float:
    """Evaluate an ordered arc chain at t (breakpoints resolve to either side)."""
    seq = list(arcs)
    for arc in seq:
        if arc.t_start <= t <= arc.t_end:
            return arc.value(t)
    # tolerate boundary jitter at the extreme ends
    if seq and abs(t - seq[0].t_start) <= _tie(t):
        return seq[0].start_value
    if seq and abs(t - seq[-1].t_end) <= _tie(t):
        return seq[-1].end_value
    raise ValidationError("chain_domain", f"t = {t} outside chain span")


def chain_values(arcs: Iterable[ExpArc], times: np.ndarray) -> np.ndarray:
    """Vectorized chain evaluation at sorted times."""
    seq = list(arcs)
    starts = np.array([a.t_start for a in seq])
    lo, hi = seq[0].t_start, seq[-1].t_end
    t = np.asarray(times, dtype=float)
    if t.size and (t[0] < lo - _tie(lo) or t[-1] > hi + _tie(hi)):
        raise ValidationError("chain_domain", "sample times outside chain span")
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(seq) - 1)
    out = np.empty_like(t)
    for i, arc in enumerate(seq):
        m = idx == i
        if m.any():
            out[m] = arc.values(t[m])
    return out


def chains_equal(a: Iterable[ExpArc], b: Iterable[ExpArc],
                 lo: float, hi: float, tol: float = 1e-10) -> bool:
    """Whether two chains agree as functions on [lo, hi].

    Compares (c, k) arc data on every subinterval of the merged breakpoint
    grid, with k re-anchored to the subinterval start; exact representation
    makes this a finite check.
    """
    sa = [x for x in a if x.t_end > lo + _tie(lo) and x.t_start < hi - _tie(hi)]
    sb = [x for x in b if x.t_end > lo + _tie(lo) and x.t_start < hi - _tie(hi)]
    if not sa or not sb:
        return False
    pts = sorted({lo, hi}
                 | {p for x in sa for p in (x.t_start, x.t_end) if lo < p < hi}
                 | {p for x in sb for p in (x.t_start, x.t_end) if lo < p < hi})
    ia = ib = 0
    for left, right in zip(pts[:-1], pts[1:]):
        if right - left <= _tie(right):
            continue
        while ia < len(sa) - 1 and sa[ia].t_end <= left + _tie(left):
            ia += 1
        while ib < len(sb) - 1 and sb[ib].t_end <= left + _tie(left):
            ib += 1
        aa, bb = sa[ia], sb[ib]
        if aa.t_start > left + _tie(left) or bb.t_start > left + _tie(left):
            return False
        ka = aa.k * math.exp(-(left - aa.t_start))
        kb = bb.k * math.exp(-(left - bb.t_start))
        scale = max(1.0, abs(aa.c), abs(bb.c), abs(ka), abs(kb))
        if abs(aa.c - bb.c) > tol * scale or abs(ka - kb) > tol * scale:
            return False
    return True


def _branch_after(value: float, slope: float, thresholds: tuple[float, ...]) -> int:
    """Branch index of (value moving with slope) just after the evaluation time."""
    b = 0
    for i, th in enumerate(thresholds):
        if value > th or (value == th and slope >= 0):
            b = i + 1
    return b


@dataclass(frozen=True)
class History:
    """An admissible initial state: an arc chain covering exactly [-tau, 0].

    Membership in Z requires finitely many zeros and no identically-zero
    stretch; both hold by construction for non-degenerate arc chains.
    """

    arcs: tuple[ExpArc, ...]

    def __post_init__(self):
        if not self.arcs:
            raise ValidationError("history_empty", "history needs at least one arc")
        if not self.arcs[0].t_start < 0 <= self.arcs[-1].t_end:
            raise ValidationError("history_span",
                                  f"history must cover [-tau, 0], got "
                                  f"[{self.arcs[0].t_start}, {self.arcs[-1].t_end}]")
        if abs(self.arcs[-1].t_end) > _tie(1.0):
            raise ValidationError("history_span", "history must end at t = 0")
        prev = None
        for arc in self.arcs:
            if arc.c == 0.0 and arc.k == 0.0:
                raise IdenticallyZeroHistory("history has an identically-zero arc")
            if prev is not None:
                if abs(arc.t_start - prev.t_end) > _tie(arc.t_start):
                    raise ValidationError("history_gap",
                                          f"chain gap at t = {arc.t_start}")
                scale = max(1.0, abs(prev.end_value))
                if abs(arc.start_value - prev.end_value) > 1e-9 * scale:
                    raise ValidationError("history_continuity",
                                          f"discontinuity at t = {arc.t_start}")
            prev = arc

    @property
    def tau(self) -> float:
        return -self.arcs[0].t_start

    def value(self, t: float) -> float:
        return chain_value(self.arcs, t)

    def values(self, times: np.ndarray) -> np.ndarray:
        return chain_values(self.arcs, times)

    def initial_sign(self) -> int:
        """Sign of the history immediately after -tau (for the delayed branch)."""
        first = self.arcs[0]
        v, s = first.start_value, -first.k
        if v != 0.0:
            return 1 if v > 0 else -1
        return 1 if s > 0 else -1

    def initial_branch(self, thresholds: tuple[float, ...]) -> int:
        first = self.arcs[0]
        return _branch_after(first.start_value, -first.k, thresholds)

    def branch_markers(self, thresholds: tuple[float, ...] = (0.0,)) -> list[tuple[float, int]]:
        """Threshold crossings in (-tau, 0) as (time, branch_after) markers.

        Touching a threshold without crossing produces no marker, so no
        spurious feedback switch gets scheduled from it. A marker at an exact
        arc breakpoint carries the branch the *next* arc moves into. The
        boundary t = 0 is excluded: whether the state crosses there is decided
        by the solution, not the history.
        """
        out: list[tuple[float, int]] = []
        b = self.initial_branch(thresholds)
        for j, arc in enumerate(self.arcs):
            cuts = sorted((t, i) for i, th in enumerate(thresholds)
                          if (t := arc.crossing(th)) is not None
                          and t < arc.t_end - _tie(arc.t_end))
            for t, i in cuts:
                # a monotone arc crosses upward iff it is rising
                b = i + 1 if arc.rising else i
                out.append((t, b))
            if j + 1 < len(self.arcs):
                nxt = self.arcs[j + 1]
                nb = _branch_after(arc.end_value, -nxt.k, thresholds)
                if nb != b:
                    b = nb
                    out.append((arc.t_end, b))
        return out

    def final_branch(self, thresholds: tuple[float, ...] = (0.0,)) -> int:
        markers = self.branch_markers(thresholds)
        return markers[-1][1] if markers else self.initial_branch(thresholds)

    def zeros(self) -> list[float]:
        """All zeros of the history in (-tau, 0], crossings and touches alike."""
        zs: list[float] = []
        for arc in self.arcs:
            t = arc.crossing(0.0)
            if t is not None and t < arc.t_end - _tie(arc.t_end):
                zs.append(t)
            if abs(arc.end_value) <= _tie(1.0):
                zs.append(arc.t_end)
        zs.sort()
        out = [zs[0]] if zs else []
        for z in zs[1:]:
            if z - out[-1] > _tie(z):
                out.append(z)
        return out

    def is_z0(self) -> bool:
        """Membership in Z0: at most one zero in (-tau, 0), with a sign change."""
        interior = [z for z in self.zeros() if z < -_tie(1.0)]
        if len(interior) > 1:
            return False
        if not interior:
            return True
        z = interior[0]
        before = self.value((z - self.tau) / 2)   # midpoint of (-tau, z)
        after = self.value(z / 2)                 # midpoint of (z, 0)
        return before * after < 0

    @staticmethod
    def constant(value: float, tau: float) -> "History":
        if value == 0.0:
            raise IdenticallyZeroHistory("constant-zero history is not in Z")
        return History((ExpArc(-tau, 0.0, value, 0.0),))

    @staticmethod
    def from_arcs(arcs: Iterable[ExpArc]) -> "History":
        return History(tuple(arcs))
