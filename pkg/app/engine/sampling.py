"""Deterministic sample plans for exact pointwise verification."""
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Tuple

from app.engine.circle import frac_mod


def farey_points() -> Iterator[Fraction]:
    """Points of [0,1) by increasing denominator, then numerator."""
    yield Fraction(0)
    q = 2
    while True:
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
        q += 1


@dataclass(frozen=True)
class SamplePlan:
    farey: int = 256
    random: int = 256
    seed: int = 0
    max_denominator: int = 1 << 20

    @classmethod
    def of_size(cls, total: int, seed: int = 0) -> "SamplePlan":
        return cls(farey=total // 2, random=total - total // 2, seed=seed)

    @property
    def size(self) -> int:
        return self.farey + self.random

    def points(self, exclude: Iterable[Fraction] = ()) -> Tuple[Fraction, ...]:
        excluded = {frac_mod(x) for x in exclude}
        chosen: List[Fraction] = []
        seen = set(excluded)
        for x in farey_points():
            if len(chosen) >= self.farey:
                break
            if x not in seen:
                seen.add(x)
                chosen.append(x)
        rng = random.Random(self.seed)
        drawn = 0
        while drawn < self.random:
            q = rng.randint(2, self.max_denominator)
            x = Fraction(rng.randrange(q), q)
            if x in seen:
                continue
            seen.add(x)
            chosen.append(x)
            drawn += 1
        return tuple(chosen)
