"""Subset selection over component sizes via a 3-dimensional table.

Items are component sizes.  M[x, y, z] holds the largest total size not
exceeding z achievable by picking at most y of the first x items; take
markers allow reconstructing a canonical argmax subset.  All entries are
integers; rational arithmetic only enters when trading the total off against
edge costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .kernels import knapsack_fill


@dataclass(frozen=True)
class KnapsackTable:
    sizes: tuple[int, ...]
    M: np.ndarray
    take: np.ndarray

    @classmethod
    def build(cls, sizes, z_max: int, y_max: int | None = None) -> "KnapsackTable":
        """Fill the table for the given item sizes and capacity z_max.

        y_max defaults to the item count; callers may cap it lower (picking
        more than z_max items can never help since sizes are positive).
        """
        sizes = tuple(int(s) for s in sizes)
        if any(s <= 0 for s in sizes):
            raise ValueError("item sizes must be positive")
        m = len(sizes)
        if y_max is None:
            y_max = m
        z_max = max(int(z_max), 0)
        arr = np.asarray(sizes, dtype=np.int64) if m else np.zeros(0, dtype=np.int64)
        M, take = knapsack_fill(arr, int(y_max), z_max)
        return cls(sizes, M, take)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def y_max(self) -> int:
        return self.M.shape[1] - 1

    @property
    def z_max(self) -> int:
        return self.M.shape[2] - 1

    def value(self, y: int, z: int) -> int:
        return int(self.M[self.m, min(y, self.y_max), z])

    def reconstruct(self, y: int, z: int) -> list[int]:
        """Item indices behind M[m, y, z], walking the take markers."""
        items = []
        for x in range(self.m, 0, -1):
            if self.take[x, y, z]:
                items.append(x - 1)
                y -= 1
                z -= self.sizes[x - 1]
        items.reverse()
        return items

    def best_net_value(self, alpha: Fraction, z_cap: int) -> tuple[Fraction, int]:
        """Maximize M[m, j, z_cap] - j*alpha over the pick count j.

        Ties go to the smallest j, so "buy nothing" wins when no purchase
        strictly helps.  Requires z_cap >= 0.
        """
        if z_cap < 0:
            raise ValueError("negative capacity")
        z_cap = min(z_cap, self.z_max)
        best = Fraction(0)
        best_j = 0
        for j in range(1, self.y_max + 1):
            val = Fraction(int(self.M[self.m, j, z_cap])) - alpha * j
            if val > best:
                best, best_j = val, j
        return best, best_j

    def min_picks_for_exact(self, z: int) -> int | None:
        """Smallest pick count reaching total exactly z, if achievable."""
        for y in range(self.y_max + 1):
            if int(self.M[self.m, y, z]) == z:
                return y
        return None

    def achievable_totals(self) -> list[int]:
        """All exactly-reachable subset totals within capacity, 0 included."""
        row = self.M[self.m, self.y_max]
        return [z for z in range(self.z_max + 1) if int(row[z]) == z]
