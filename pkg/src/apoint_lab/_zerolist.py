"""Sorted container of critical-line zero ordinates with a coverage window."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CoverageError, DomainError


@dataclass(frozen=True)
class ZeroOrdinate:
    index: int
    gamma: float
    bracket_width: float
    beta: float = 0.5


class ZeroList:
    """Zero ordinates known to be complete on the closed window [lo, hi].

    ``betas`` defaults to 1/2 for every entry; synthetic off-line zeros can be
    injected by passing explicit real parts.
    """

    __slots__ = ("lo", "hi", "gammas", "betas", "indices", "widths")

    def __init__(self, gammas, lo: float, hi: float, *, betas=None, indices=None, widths=None):
        g = np.asarray(gammas, dtype=float).reshape(-1)
        order = np.argsort(g, kind="stable")
        g = g[order]
        if lo > hi:
            raise DomainError("lo must not exceed hi")
        if g.size and (g[0] < lo or g[-1] > hi):
            raise DomainError("ordinates fall outside the declared window")
        self.lo = float(lo)
        self.hi = float(hi)
        self.gammas = g
        self.betas = (np.full(g.size, 0.5) if betas is None
                      else np.asarray(betas, dtype=float).reshape(-1)[order])
        self.indices = (np.arange(1, g.size + 1) if indices is None
                        else np.asarray(indices, dtype=np.int64).reshape(-1)[order])
        self.widths = (np.zeros(g.size) if widths is None
                       else np.asarray(widths, dtype=float).reshape(-1)[order])
        for arr in (self.gammas, self.betas, self.indices, self.widths):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.gammas.size

    def __getitem__(self, i: int) -> ZeroOrdinate:
        return ZeroOrdinate(int(self.indices[i]), float(self.gammas[i]),
                            float(self.widths[i]), float(self.betas[i]))

    def __iter__(self) -> Iterator[ZeroOrdinate]:
        return (self[i] for i in range(len(self)))

    def __repr__(self) -> str:
        return f"ZeroList({len(self)} zeros on [{self.lo:g}, {self.hi:g}])"

    def covers(self, a: float, b: float) -> bool:
        return self.lo <= a and b <= self.hi

    def require(self, a: float, b: float) -> None:
        if not self.covers(a, b):
            raise CoverageError(
                f"zero list covers [{self.lo:g}, {self.hi:g}], need [{a:g}, {b:g}]")

    def window(self, a: float, b: float) -> slice:
        """Slice of entries with a <= gamma <= b."""
        i = int(np.searchsorted(self.gammas, a, side="left"))
        j = int(np.searchsorted(self.gammas, b, side="right"))
        return slice(i, j)

    def nearest_distance(self, t) -> np.ndarray:
        """Distance from each t to the closest stored ordinate (inf if none)."""
        t = np.asarray(t, dtype=float)
        g = self.gammas
        if g.size == 0:
            return np.full(t.shape, np.inf)
        k = np.searchsorted(g, t)
        left = np.abs(t - g[np.clip(k - 1, 0, g.size - 1)])
        right = np.abs(g[np.clip(k, 0, g.size - 1)] - t)
        return np.minimum(left, right)


def as_zero_list(zeros, lo: float | None = None, hi: float | None = None) -> ZeroList:
    """Accept a ZeroList, a sequence of ZeroOrdinate, or bare floats.

    Bare sequences carry no coverage information; unless ``lo``/``hi`` are
    given, the window is taken as [min, max] of the ordinates.
    """
    if isinstance(zeros, ZeroList):
        return zeros
    items = list(zeros)
    if items and isinstance(items[0], ZeroOrdinate):
        g = [z.gamma for z in items]
        b = [z.beta for z in items]
        idx = [z.index for z in items]
        w = [z.bracket_width for z in items]
    else:
        g = [float(z) for z in items]
        b, idx, w = None, None, None
    if not g and (lo is None or hi is None):
        raise CoverageError("empty zero sequence without an explicit window")
    lo = min(g) if lo is None else lo
    hi = max(g) if hi is None else hi
    return ZeroList(g, lo, hi, betas=b, indices=idx, widths=w)
