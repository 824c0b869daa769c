"""Cokernel shapes, Fitting exponents, and the Selmer-length inequality report."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import UsageError
from .groupring import Character, GroupRingElement, PrimePowerRing, specialize
from .intmatrix import IntMatrix, smith_normal_form


@dataclass(frozen=True)
class AbelianGroupShape:
    """Invariant factors d1 | d2 | ... (each > 1) plus free rank."""

    invariant_factors: tuple
    free_rank: int

    def __post_init__(self):
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise UsageError("invariant factors must form a divisibility chain")
        if any(d <= 1 for d in self.invariant_factors):
            raise UsageError("trivial factors are dropped from the shape")

    @property
    def order(self):
        """Group order, or None when the free rank is positive."""
        if self.free_rank:
            return None
        return math.prod(self.invariant_factors) if self.invariant_factors else 1

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def cokernel_shape(M: IntMatrix) -> AbelianGroupShape:
    """Shape of coker(M) = Z^rows / column span, via Smith normal form."""
    _, S, _ = smith_normal_form(M)
    diag = S.diagonal()
    rank = sum(1 for d in diag if d != 0)
    factors = tuple(d for d in diag if d > 1)
    return AbelianGroupShape(factors, M.rows - rank)


def fitting_exponent(presentation: IntMatrix, ring: PrimePowerRing):
    """Exponent t with Fitt(X ⊗ Z/p^n) generated by p^t, or None (zero ideal).

    The module X is presented with generators indexed by rows and relations by
    columns; the zeroth Fitting ideal is generated by the maximal minors,
    equivalently by the product of the Smith invariant factors. The exponent is
    the exact p-valuation of that product: t >= n means the induced ideal in
    Z/p^n vanishes but the exponent is still reported; None is reserved for
    identically zero minors (the presented module has free rank).
    """
    if presentation.cols < presentation.rows:
        raise UsageError("presentation needs at least as many columns as generators")
    _, S, _ = smith_normal_form(presentation)
    t = 0
    for i in range(presentation.rows):
        d = S.entries[i][i]
        if d == 0:
            return None
        while d % ring.p == 0:
            d //= ring.p
            t += 1
    return t


def module_length(presentation: IntMatrix, p: int):
    """Z_p-length of coker(presentation), or None when the cokernel has free rank."""
    _, S, _ = smith_normal_form(presentation)
    diag = S.diagonal()
    rank = sum(1 for d in diag if d != 0)
    if rank < presentation.rows:
        return None
    s = 0
    for d in diag:
        while d % p == 0:
            d //= p
            s += 1
    return s


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of the Selmer-length vs L-valuation comparison at one character.

    Valuations are in the (1-zeta)-normalization of the character's target
    ring, where v(p) = ramification_index, so length and valuation compare in
    the same unit. A failing comparison is reported, never raised.
    """

    selmer_length: object  # int or None (= infinite / free part present)
    l_valuation: int
    ramification_index: int
    twice_t: int
    holds: object  # bool or None when the length is infinite
    fitting_contains_value: object

    def describe(self) -> str:
        s = "infinite" if self.selmer_length is None else str(self.selmer_length)
        verdict = {True: "s <= 2t holds", False: "VIOLATION: s > 2t",
                   None: "not comparable (infinite length)"}[self.holds]
        return (f"s = {s}, 2t = {self.twice_t} "
                f"(ramification index {self.ramification_index}); {verdict}")


def inequality_check(sel_presentation: IntMatrix, L: GroupRingElement,
                     chi: Character) -> InequalityReport:
    """Compare length(coker) against 2·v(chi(L)) and the Fitting containment.

    L is the half element (the L-function element is L·L^*), so the compared
    valuation is 2t = 2·v(chi(L)).
    """
    e = chi.target_ring().degree  # ramification index over Z_p
    raw_len = module_length(sel_presentation, chi.p)
    s = None if raw_len is None else raw_len * e
    val = specialize(L, chi).valuation()
    twice_t = 2 * val
    holds = None if s is None else (s <= twice_t)
    # Fitting containment: (p-power of exponent s) contains chi(L)^2
    contains = None if s is None else (twice_t >= s)
    return InequalityReport(s, val, e, twice_t, holds, contains)
