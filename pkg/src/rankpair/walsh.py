"""Exact shift-orthonormal algebra over the two-sided fair-coin shift.

Basis elements are finite products of the +-1 coordinate functions,
indexed by finite sets of coordinates; distinct index sets are orthogonal,
each product has norm one, and the shift translates index sets by one.
That makes every inner product a finite rational sum and lets the
truncation step hand out a hard cutoff ``M`` past which shifted copies
are *exactly* orthogonal: two supports can only overlap when the shift is
at most the spread of the occupied indices.

Renormalizing a truncation generally needs an irrational scalar, so the
truncated polynomial is returned raw together with its exact squared
norm; all orthogonality claims are scale-invariant and the distance-to-
``f`` guarantee is checked through an exact inequality between squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

IndexSet = frozenset[int]


@dataclass(frozen=True)
class WalshPolynomial:
    """Finite rational combination of coordinate-product basis elements."""

    terms: tuple[tuple[IndexSet, Fraction], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Iterable[int], Fraction | int]]) -> "WalshPolynomial":
        acc: dict[IndexSet, Fraction] = {}
        for idx, c in terms:
            key = frozenset(idx)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        items = tuple(
            sorted(
                ((k, v) for k, v in acc.items() if v != 0),
                key=lambda t: sorted(t[0]),
            )
        )
        return cls(items)

    @classmethod
    def coordinate(cls, i: int) -> "WalshPolynomial":
        return cls.from_terms([((i,), 1)])

    def coefficient(self, idx: Iterable[int]) -> Fraction:
        key = frozenset(idx)
        for k, v in self.terms:
            if k == key:
                return v
        return Fraction(0)

    def norm_sq(self) -> Fraction:
        return sum((c * c for _, c in self.terms), Fraction(0))

    def is_zero_mean(self) -> bool:
        return self.coefficient(()) == 0

    def index_span(self) -> tuple[int, int] | None:
        indices = [i for k, _ in self.terms for i in k]
        if not indices:
            return None
        return (min(indices), max(indices))


def shift_power(p: WalshPolynomial, m: int) -> WalshPolynomial:
    """Translate every index set by ``m``; exact and invertible."""
    return WalshPolynomial(
        tuple((frozenset(i + m for i in k), c) for k, c in p.terms)
    )


def inner_product(p: WalshPolynomial, q: WalshPolynomial) -> Fraction:
    lookup = dict(q.terms)
    return sum((c * lookup.get(k, Fraction(0)) for k, c in p.terms), Fraction(0))


def shift_cutoff(p: WalshPolynomial) -> int:
    """Smallest ``M`` our rule certifies: shifted copies of ``p`` are
    orthogonal for every shift above the spread of its occupied indices."""
    span = p.index_span()
    if span is None:
        return 0
    return span[1] - span[0] + 1


@dataclass
class Lemma3Truncation:
    f_prime: WalshPolynomial     # raw (unnormalized) truncation
    cutoff: int                  # orthogonality holds exactly past this shift
    kept_norm_sq: Fraction
    tail_frac: Fraction          # dropped mass / total mass, exact

    def distance_below(self, delta: Fraction) -> bool:
        """Exact check that the *renormalized* truncation is within ``delta``
        of the (normalized) input: squared distance is 2 - 2 sqrt(1 - t),
        compared against delta^2 through an equivalent rational inequality."""
        delta = Fraction(delta)
        if delta <= 0:
            return False
        d2 = delta * delta
        if d2 >= 2:
            return True
        target = 1 - d2 / 2
        return (1 - self.tail_frac) > target * target


def lemma3_truncate(
    f: WalshPolynomial, delta: Fraction, max_terms: int | None = None
) -> Lemma3Truncation:
    """Truncate to a finite window with certified shift-orthogonality cutoff.

    Terms are kept in order of increasing coordinate magnitude until the
    dropped mass is provably small enough that the renormalized truncation
    sits within ``delta`` of the input (``max_terms`` caps the kept count
    and fails loudly when the cap defeats the guarantee).
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not f.is_zero_mean():
        raise ValueError("input must be zero-mean (no constant term)")
    if not f.terms:
        raise ValueError("input is zero")
    total = f.norm_sq()
    ordered = sorted(f.terms, key=lambda t: (max(abs(i) for i in t[0]), sorted(t[0])))
    kept: list[tuple[IndexSet, Fraction]] = []
    kept_sq = Fraction(0)
    result = None
    for k, c in ordered:
        kept.append((k, c))
        kept_sq += c * c
        trunc = Lemma3Truncation(
            f_prime=WalshPolynomial(tuple(kept)),
            cutoff=0,
            kept_norm_sq=kept_sq,
            tail_frac=(total - kept_sq) / total,
        )
        if trunc.distance_below(delta):
            result = trunc
            break
        if max_terms is not None and len(kept) >= max_terms:
            raise ValueError(
                f"cannot reach distance {delta} within {max_terms} terms"
            )
    assert result is not None  # full prefix always reaches distance 0
    result.cutoff = shift_cutoff(result.f_prime)
    return result


def corr_tail_certificate(
    f_prime: WalshPolynomial, cutoff: int, horizon: int
) -> Fraction:
    """Exact absolute-correlation sum of the shifted truncation over
    ``(cutoff, horizon]``; zero whenever the cutoff rule was honored."""
    return correlation_budget(f_prime, cutoff + 1, horizon)


def correlation_budget(p: WalshPolynomial, lo: int, hi: int) -> Fraction:
    """Exact value of the absolute-correlation sum over shifts ``[lo, hi]``.

    Only shifts up to the index spread can produce overlap, so the sum is
    finite work regardless of the horizon.
    """
    span = shift_cutoff(p)
    total = Fraction(0)
    for m in range(lo, min(hi, span) + 1):
        total += abs(inner_product(shift_power(p, m), p))
    return total
