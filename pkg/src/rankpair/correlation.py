"""Certified correlation brackets for level functions.

Every value ``(f, T^n g)`` reduces to counting position pairs at fixed
differences between the occurrence sets of two tracked base levels.  The
engine below carries those pair counts through the stages without ever
materialising the (potentially astronomically long) occurrence lists: it
keeps the exact count table for differences inside a window ``[-W, W]``
together with the occurrence positions near the bottom and the top of the
tower, which is all that cross-copy pairs can ever touch.

Each depth yields a bracket ``[lower, upper]``: ``lower`` counts the pairs
already inside the tower, and the defect is bounded by the mass of
occurrences within reach of the tower top.  Deepening the tower never
widens a bracket, so the intervals are nested and the certified gap can
only shrink.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .core import LevelFunction, RankOneSpec, StageSpec

Interval = tuple[Fraction, Fraction]


class CoverageError(ValueError):
    """A sequence does not cover the requested index range."""


class ToleranceNotReached(RuntimeError):
    """The spec ran out of stages before the certified gap met the tolerance."""

    def __init__(self, achieved_gap: Fraction):
        super().__init__(f"spec exhausted; achieved gap {achieved_gap}")
        self.achieved_gap = achieved_gap


@dataclass
class _SetWindow:
    """Occurrence positions of one base level near the tower bottom and top."""

    bot: list[int]
    top: list[int]
    count: int
    maxpos: int

    @classmethod
    def initial(cls) -> "_SetWindow":
        return cls(bot=[0], top=[0], count=1, maxpos=0)

    def step(self, st: StageSpec, h: int, h_new: int, window: int) -> "_SetWindow":
        offs = st.offsets(h)
        bot = []
        for off in offs:
            if off > window:
                break
            bot.extend(off + a for a in self.bot if off + a <= window)
        top = []
        lo = h_new - window
        for off in offs:
            if off + self.maxpos < lo:
                continue
            top.extend(off + a for a in self.top if off + a >= lo)
        return _SetWindow(
            bot=bot,
            top=top,
            count=self.count * st.cuts,
            maxpos=offs[-1] + self.maxpos,
        )


@dataclass
class PairProfile:
    """Exact difference-count state for a pair of tracked base levels."""

    depth: int
    height: int
    width: Fraction
    window: int
    counts: dict[int, int]  # signed difference -> exact pair count
    f: _SetWindow
    g: _SetWindow

    def pair_count(self, m: int) -> int:
        if abs(m) > self.window:
            raise CoverageError(f"difference {m} outside engine window {self.window}")
        return self.counts.get(m, 0)

    def top_zone(self, m: int) -> int:
        """Occurrences that a difference-``m`` pair could still pick up at
        deeper stages: those within ``|m|`` of the tower top."""
        if m == 0:
            return 0
        win = self.f if m > 0 else self.g
        return len(win.top) - bisect.bisect_left(win.top, self.height - abs(m))

    def base_bracket(self, m: int) -> Interval:
        lower = self.pair_count(m) * self.width
        return (lower, lower + self.top_zone(m) * self.width)


def _pair_profiles(
    spec: RankOneSpec, stage_f: int, stage_g: int, window: int
) -> Iterator[PairProfile]:
    """Yield the profile at every depth from ``max(stage_f, stage_g)`` down."""
    heights = spec.heights()
    widths = spec.widths()
    d0 = max(stage_f, stage_g)
    wf = _SetWindow.initial()
    wg = _SetWindow.initial()
    for d in range(min(stage_f, stage_g), d0):
        st = spec.stages[d - 1]
        if stage_f < stage_g:
            wf = wf.step(st, heights[d - 1], heights[d], window)
        else:
            wg = wg.step(st, heights[d - 1], heights[d], window)
    counts: dict[int, int] = {}
    if stage_f == stage_g:
        counts[0] = 1
    elif stage_f < stage_g:
        for a in wf.bot:
            counts[-a] = counts.get(-a, 0) + 1
    else:
        for b in wg.bot:
            counts[b] = counts.get(b, 0) + 1
    prof = PairProfile(
        depth=d0, height=heights[d0 - 1], width=widths[d0 - 1],
        window=window, counts=counts, f=wf, g=wg,
    )
    yield prof
    for d in range(d0, spec.max_depth):
        st = spec.stages[d - 1]
        h, h_new = heights[d - 1], heights[d]
        offs = st.offsets(h)
        new_counts = {m: c * st.cuts for m, c in prof.counts.items()}

        def add(m):
            new_counts[m] = new_counts.get(m, 0) + 1

        for i, oi in enumerate(offs):
            for j, oj in enumerate(offs):
                if i == j:
                    continue
                delta = oj - oi
                if delta > 0:
                    # f-occurrence near the top of copy i, g near the bottom of copy j
                    if delta - prof.f.maxpos > window:
                        continue
                    for a in prof.f.top:
                        base = delta - a
                        for b in prof.g.bot:
                            m = b + base
                            if m > window:
                                break
                            if m >= -window:
                                add(m)
                else:
                    if -delta - prof.g.maxpos > window:
                        continue
                    for b in prof.g.top:
                        base = b + delta
                        for a in prof.f.bot:
                            m = base - a
                            if m < -window:
                                break
                            if m <= window:
                                add(m)
        prof = PairProfile(
            depth=d + 1, height=h_new, width=widths[d],
            window=window, counts=new_counts,
            f=prof.f.step(st, h, h_new, window),
            g=prof.g.step(st, h, h_new, window),
        )
        yield prof


def _needed_differences(f: LevelFunction, g: LevelFunction, n: int):
    return [
        (cf * cg, n + lf - lg)
        for lf, cf in f.coefficients
        for lg, cg in g.coefficients
    ]


def _function_bracket(prof: PairProfile, f, g, n) -> Interval:
    lo = Fraction(0)
    hi = Fraction(0)
    for coeff, m in _needed_differences(f, g, n):
        a, b = prof.base_bracket(m)
        if coeff >= 0:
            lo += coeff * a
            hi += coeff * b
        else:
            lo += coeff * b
            hi += coeff * a
    return (lo, hi)


def _function_gap(prof: PairProfile, f, g, n) -> Fraction:
    return sum(
        (abs(coeff) * prof.top_zone(m) * prof.width
         for coeff, m in _needed_differences(f, g, n)),
        Fraction(0),
    )


def _window_for(f: LevelFunction, g: LevelFunction, n_max: int) -> int:
    span_f = max(f.levels) if f.levels else 0
    span_g = max(g.levels) if g.levels else 0
    return n_max + span_f + span_g


def cross_correlation(
    spec: RankOneSpec,
    f: LevelFunction,
    g: LevelFunction,
    n: int,
    tolerance: Optional[Fraction] = None,
) -> Interval:
    """Certified bracket for ``(f, T^n g)``.

    Deepens through the spec's stages until the bracket width is at most
    ``tolerance`` (``None`` = use the full spec), then stops.  Raises
    :class:`ToleranceNotReached` when the spec is exhausted first.
    """
    window = _window_for(f, g, abs(n))
    last = None
    for prof in _pair_profiles(spec, f.stage, g.stage, window):
        last = prof
        if tolerance is not None and _function_gap(prof, f, g, n) <= tolerance:
            return _function_bracket(prof, f, g, n)
    bracket = _function_bracket(last, f, g, n)
    if tolerance is not None and bracket[1] - bracket[0] > tolerance:
        raise ToleranceNotReached(bracket[1] - bracket[0])
    return bracket


def autocorrelation(
    spec: RankOneSpec,
    f: LevelFunction,
    n: int,
    tolerance: Optional[Fraction] = None,
) -> Interval:
    """Certified bracket for ``(f, T^n f)``; even in ``n`` for real ``f``."""
    return cross_correlation(spec, f, f, n, tolerance)


@dataclass
class CorrelationSequence:
    """Table ``n -> (lower, upper)`` of certified correlation brackets."""

    entries: dict[int, Interval]
    norm_sq: Fraction
    subject: str = ""

    def entry(self, n: int) -> Interval:
        if n not in self.entries:
            raise CoverageError(f"n={n} not covered by sequence '{self.subject}'")
        return self.entries[n]

    def covers(self, lo: int, hi: int) -> bool:
        return all(n in self.entries for n in range(lo, hi + 1))

    def midpoint(self, n: int) -> Fraction:
        a, b = self.entry(n)
        return (a + b) / 2

    def is_exact(self, n: int) -> bool:
        a, b = self.entry(n)
        return a == b

    def support(self) -> list[int]:
        """Indices whose value is not certified to be zero."""
        return sorted(n for n, (a, b) in self.entries.items() if a != 0 or b != 0)


def correlation_sequence(
    spec: RankOneSpec,
    f: LevelFunction,
    n_values,
    g: Optional[LevelFunction] = None,
    tolerance: Optional[Fraction] = None,
    subject: str = "",
) -> CorrelationSequence:
    """Bracket a whole range of lags off a single engine pass.

    The profile is deepened until every lag meets ``tolerance`` (or the
    spec ends); all brackets are then read from the deepest profile, so the
    table is internally consistent.
    """
    g = g or f
    ns = sorted(set(n_values))
    window = _window_for(f, g, max((abs(n) for n in ns), default=0))
    last = None
    for prof in _pair_profiles(spec, f.stage, g.stage, window):
        last = prof
        if tolerance is not None and all(
            _function_gap(prof, f, g, n) <= tolerance for n in ns
        ):
            break
    else:
        if tolerance is not None:
            worst = max(_function_gap(last, f, g, n) for n in ns)
            if worst > tolerance:
                raise ToleranceNotReached(worst)
    entries = {n: _function_bracket(last, f, g, n) for n in ns}
    norm_sq = f.norm_sq(spec) if g is f else f.norm_sq(spec)
    return CorrelationSequence(entries=entries, norm_sq=norm_sq, subject=subject)


def _abs_interval(iv: Interval) -> Interval:
    a, b = iv
    if a <= 0 <= b:
        return (Fraction(0), max(-a, b))
    return (min(abs(a), abs(b)), max(abs(a), abs(b)))


def corr_functional(seq: CorrelationSequence, interval: tuple[int, int]) -> Interval:
    """Bracket for the absolute correlation budget over an index interval."""
    lo, hi = interval
    if not seq.covers(lo, hi):
        raise CoverageError(f"interval [{lo}, {hi}] not covered")
    total_lo = Fraction(0)
    total_hi = Fraction(0)
    for n in range(lo, hi + 1):
        a, b = _abs_interval(seq.entry(n))
        total_lo += a
        total_hi += b
    return (total_lo, total_hi)


def product_correlation(
    seq_s: CorrelationSequence, seq_t: CorrelationSequence
) -> CorrelationSequence:
    """Entrywise product: the correlation sequence of the tensor-product system."""
    common = set(seq_s.entries) & set(seq_t.entries)
    if not common:
        raise CoverageError("sequences share no lags")
    entries = {}
    for n in common:
        a, b = seq_s.entries[n]
        c, d = seq_t.entries[n]
        prods = (a * c, a * d, b * c, b * d)
        entries[n] = (min(prods), max(prods))
    return CorrelationSequence(
        entries=entries,
        norm_sq=seq_s.norm_sq * seq_t.norm_sq,
        subject=f"({seq_s.subject}) x ({seq_t.subject})",
    )
