"""Universal prior over positive integers for mixture weighting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError


@dataclass(frozen=True)
class IntegerPrior:
    """Prior masses for j = 1..j_max as exact rationals summing to one.

    ``truncated_tail_estimate`` records how much mass the untruncated
    proportionality series would carry beyond j_max (integral estimate); the
    shipped masses themselves are renormalized over the kept range.
    """

    masses: tuple[Fraction, ...]
    truncated_tail_estimate: float

    @property
    def j_max(self) -> int:
        return len(self.masses)

    @property
    def tail_mass(self) -> float:
        """Mass not assigned to 1..j_max; zero after exact renormalization."""
        return float(1 - sum(self.masses))

    def mass(self, j: int) -> Fraction:
        if not 1 <= j <= self.j_max:
            raise ValidationError(f"j={j} outside prior support 1..{self.j_max}")
        return self.masses[j - 1]

    def neg_log2(self, j: int) -> float:
        m = self.mass(j)
        return math.log2(m.denominator) - math.log2(m.numerator)


def rissanen_prior(j_max: int = 4096) -> IntegerPrior:
    """Prior proportional to 1 / (j * (log2(j + 1))^2), truncated at j_max.

    Satisfies -log2 pi(j) = log2 j + O(log log j). Raw float weights are taken
    at their exact binary values and normalized exactly, so the masses are
    honest rationals summing to one.
    """
    if j_max < 1:
        raise ValidationError("j_max must be >= 1")
    raw = [Fraction(1.0 / ((j + 1) * math.log2(j + 2) ** 2))
           for j in range(j_max)]
    total = sum(raw)
    masses = tuple(w / total for w in raw)
    # integral of dx / (x log2(x)^2) from j_max+1, relative to the kept sum
    tail = math.log(2.0) / math.log2(j_max + 1) / float(total)
    return IntegerPrior(masses=masses, truncated_tail_estimate=tail)
