"""Shifted Gram points g_n, defined by theta(g_n) = pi n - phi.

Ordinates are refined in extended precision (``np.longdouble``) so that the
defining equation holds to 1e-9 even where theta(t) is of size 1e7; the
returned ``t`` is the nearest double and ``residual`` is measured for that
double.  Above t = 2**21 the double grid itself is too coarse for 1e-9 and a
``PrecisionWarning`` is issued.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._zerolist import as_zero_list
from .errors import ConvergenceError, DomainError, PrecisionWarning
from .special_fn import MAX_HEIGHT, lambert_w0, theta_derivative, theta_ext

_LD = np.longdouble
_PI_LD = _LD(4) * np.arctan(_LD(1))
_E_LD = np.exp(_LD(1))

RESIDUAL_TOL = 1e-9
_EPS_LD = np.finfo(_LD).eps
_NEWTON_MAX = 8
_DOUBLE_SAFE = 2.0**21
MIN_ORDINATE = 10.0


@dataclass(frozen=True)
class ShiftedGramPoint:
    n: int
    phi: float
    t: float
    residual: float
    seed_gap: float


class GramClass(str, enum.Enum):
    STAR = "star"
    SUBSTAR = "substar"


def phase_of(a: complex) -> float:
    """Argument of a in (-pi, pi]."""
    a = complex(a)
    if a == 0:
        raise DomainError("a = 0 has no phase")
    phi = cmath.phase(a)
    # cmath.phase(-1 - 0j) is -pi; fold it onto the included endpoint
    return math.pi if phi == -math.pi else phi


def _check_phi(phi: float) -> float:
    phi = float(phi)
    if not (-math.pi < phi <= math.pi):
        raise DomainError("phi must lie in (-pi, pi]")
    return phi


def _seed_argument(n, phi):
    n = np.asarray(n, dtype=_LD)
    return (n + _LD(0.125) - _LD(phi) / _PI_LD) / _E_LD


def shifted_gram_seed(n, phi: float):
    """Closed-form seed 2 pi exp(1 + W((n + 1/8 - phi/pi) / e)).

    Solves the two-term truncation of the Stirling expansion of theta exactly.
    Scalar input gives a float, array input an array of longdouble.
    """
    phi = _check_phi(phi)
    z = _seed_argument(n, phi)
    if np.any(z < 0):
        raise DomainError("index too small: seed argument is negative")
    seed = 2 * _PI_LD * np.exp(1 + lambert_w0(np.atleast_1d(z)))
    return float(seed[0]) if np.ndim(n) == 0 else seed


class GramBatch:
    """Array form of many shifted Gram points sharing one phase."""

    __slots__ = ("phi", "n", "t", "residual", "seed_gap")

    def __init__(self, phi, n, t, residual, seed_gap):
        self.phi = float(phi)
        self.n = n
        self.t = t
        self.residual = residual
        self.seed_gap = seed_gap
        for arr in (n, t, residual, seed_gap):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.n.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return GramBatch(self.phi, self.n[i], self.t[i], self.residual[i], self.seed_gap[i])
        return ShiftedGramPoint(int(self.n[i]), self.phi, float(self.t[i]),
                                float(self.residual[i]), float(self.seed_gap[i]))

    def __iter__(self) -> Iterator[ShiftedGramPoint]:
        return (self[i] for i in range(len(self)))

    def __repr__(self) -> str:
        if not len(self):
            return f"GramBatch(phi={self.phi:g}, empty)"
        return (f"GramBatch(phi={self.phi:g}, n={self.n[0]}..{self.n[-1]}, "
                f"t in [{self.t[0]:.6f}, {self.t[-1]:.6f}])")


def _refine(n: np.ndarray, phi: float, seed: np.ndarray) -> np.ndarray:
    target = _PI_LD * n.astype(_LD) - _LD(phi)
    # theta itself is only known to a few ulps of |theta|
    tol = 1e-14 + 64 * _EPS_LD * np.abs(target)
    t = seed.copy()
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(_NEWTON_MAX):
        f = theta_ext(t) - target
        done = np.abs(f) <= tol
        if done.all():
            break
        t = np.where(done, t, t - f / theta_derivative(t))
    else:
        done = np.abs(theta_ext(t) - target) <= tol
    if not done.all():
        t = _bisect_fallback(t, ~done, target, seed)
    return t


def _bisect_fallback(t, bad, target, seed):
    half = 2 * _PI_LD / np.log(seed[bad])
    lo, hi = seed[bad] - half, seed[bad] + half
    tgt = target[bad]
    if np.any(theta_ext(lo) > tgt) or np.any(theta_ext(hi) < tgt):
        raise ConvergenceError("Gram refinement failed and the fallback bracket is invalid")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = theta_ext(mid) < tgt
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4 * _EPS_LD * hi):
            break
    t = t.copy()
    t[bad] = 0.5 * (lo + hi)
    return t


def gram_batch(ns: Sequence[int] | np.ndarray, phi: float) -> GramBatch:
    """Refine shifted Gram points for an array of indices."""
    phi = _check_phi(phi)
    n = np.asarray(ns, dtype=np.int64).reshape(-1)
    if n.size == 0:
        empty = np.empty(0)
        return GramBatch(phi, n.copy(), empty, empty.copy(), empty.copy())
    z = _seed_argument(n, phi)
    if np.any(z < 0):
        raise DomainError("index too small: seed argument is negative")
    seed = 2 * _PI_LD * np.exp(1 + lambert_w0(z))
    if np.any(seed < MIN_ORDINATE):
        raise DomainError(f"seed below {MIN_ORDINATE}: index too small")
    t_ext = _refine(n, phi, seed)
    t = t_ext.astype(float)
    if t.size and t[-1] > _DOUBLE_SAFE:
        warnings.warn("ordinates above 2**21 cannot meet a 1e-9 theta residual in double",
                      PrecisionWarning, stacklevel=2)
    residual = np.abs(theta_ext(t.astype(_LD)) + _LD(phi) - _PI_LD * n.astype(_LD)).astype(float)
    seed_gap = np.abs(t_ext - seed).astype(float)
    return GramBatch(phi, n, t, residual, seed_gap)


def shifted_gram(n: int, phi: float) -> ShiftedGramPoint:
    """The n-th shifted Gram point of phase phi (Newton from the W seed)."""
    return gram_batch([int(n)], phi)[0]


def gram_index_bounds(t, phi: float) -> np.ndarray:
    """A(t) = (theta(t) + phi) / pi evaluated in extended precision."""
    return (theta_ext(np.asarray(t, dtype=_LD)) + _LD(phi)) / _PI_LD


def grams_in_range(T1: float, T2: float, phi: float, *, min_height: float = 1e3) -> GramBatch:
    """All shifted Gram points with T1 < t <= T2.

    The indices are exactly the integers in (A(T1), A(T2)].  ``min_height``
    is the lower admissible T1; internal callers lower it to 10.
    """
    phi = _check_phi(phi)
    T1, T2 = float(T1), float(T2)
    if not (min_height <= T1 < T2 <= MAX_HEIGHT):
        raise DomainError(f"need {min_height:g} <= T1 < T2 <= {MAX_HEIGHT:g}")
    a1, a2 = gram_index_bounds([T1, T2], phi)
    lo = int(np.floor(a1)) + 1
    hi = int(np.floor(a2))
    if hi < lo - 1:
        hi = lo - 1
    # one index of slack on each side absorbs rounding in A at the seams
    ns = np.arange(max(lo - 1, _first_index(phi)), hi + 2)
    batch = gram_batch(ns, phi)
    keep = (batch.t > T1) & (batch.t <= T2)
    idx = np.nonzero(keep)[0]
    if idx.size == 0:
        return batch[0:0]
    return batch[idx[0]: idx[-1] + 1]


def _first_index(phi: float) -> int:
    """Smallest n whose seed is at least MIN_ORDINATE."""
    n = -1
    while True:
        z = float(_seed_argument(n, phi))
        if z >= 0 and 2 * math.pi * math.exp(1 + float(lambert_w0(z))) >= MIN_ORDINATE:
            return n
        n += 1


def spacing_check(points, T: float, *, lags: Sequence[int] = (1,)) -> float:
    """max |(g_l - g_m) ln T / (2 pi (l - m)) - 1| over pairs with l - m in ``lags``.

    Gram spacing decreases monotonically in t, so the mean spacing over any
    run of consecutive points lies between adjacent spacings and the
    adjacent pairs (the default) already realise the maximum over all pairs.
    """
    if isinstance(points, GramBatch):
        n, t = points.n, points.t
        phis = {points.phi}
    else:
        pts = list(points)
        n = np.array([p.n for p in pts], dtype=np.int64)
        t = np.array([p.t for p in pts], dtype=float)
        phis = {p.phi for p in pts}
    if len(phis) > 1:
        raise DomainError("spacing_check needs a single phase")
    order = np.argsort(n)
    n, t = n[order], t[order]
    if t.size and (t[0] <= T or t[-1] > 2 * T):
        raise DomainError("points must lie in (T, 2T]")
    scale = math.log(T) / (2 * math.pi)
    worst = 0.0
    for lag in lags:
        if lag < 1 or lag >= t.size:
            continue
        dn = (n[lag:] - n[:-lag]).astype(float)
        dev = np.abs((t[lag:] - t[:-lag]) * scale / dn - 1.0)
        worst = max(worst, float(dev.max()))
    return worst


def star_threshold(t):
    """1 / (ln(t + 2) ln ln(t + 3)), the cut between g* and g_* points."""
    t = np.asarray(t, dtype=float)
    return 1.0 / (np.log(t + 2.0) * np.log(np.log(t + 3.0)))


def classify_gram(g: ShiftedGramPoint, zeros) -> GramClass:
    """STAR if the nearest zero ordinate is at least ``star_threshold`` away."""
    zl = as_zero_list(zeros)
    zl.require(g.t - 1.0, g.t + 1.0)
    eta = float(zl.nearest_distance(g.t))
    return GramClass.STAR if eta >= float(star_threshold(g.t)) else GramClass.SUBSTAR
