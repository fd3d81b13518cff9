"""Critical-line zeros, the distance eta_t, and nontrivial a-points of zeta.

Zeros are located by sign changes of Hardy's Z between classical Gram points.
The scan is organised in blocks bounded by *good* Gram points, those with
(-1)^j Z(g_j) > 0; a block from g_j to g_k is expected to hold k - j zeros
and its Gram intervals are bisected (up to 64 pieces each) until that many
sign changes appear.

a-points are counted with the argument principle on a rectangle and located
with complex Newton iterations seeded near the critical line.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._parallel import chunked_eval
from ._zerolist import ZeroList, ZeroOrdinate, as_zero_list
from .errors import (BoundaryProximityError, ConvergenceError, DomainError,
                     IncompleteCaptureWarning, MissingZeroError)
from .gram import ShiftedGramPoint, gram_batch, gram_index_bounds, grams_in_range, phase_of
from .special_fn import (MAX_HEIGHT, TWO_PI, hardy_z, riemann_siegel_theta, zeta,
                         zeta_with_derivative)

__all__ = [
    "ZeroOrdinate", "ZeroList", "find_zeros", "eta", "riemann_von_mangoldt",
    "near_zero_mask", "APoint", "APointCount", "count_apoints", "winding_number",
    "find_apoints", "online_apoint_test", "apoint_main_term",
]

ZERO_TOL = 1e-8
MAX_SUBDIVISION = 64
COUNT_SLACK = 2
_LOW_ANCHOR = 10.0  # no zeros below 14.13, so N(10) = 0 exactly


def hz(t) -> np.ndarray:
    """Hardy Z over an array, evaluated in parallel chunks."""
    return chunked_eval(hardy_z, np.asarray(t, dtype=float))


def riemann_von_mangoldt(T):
    """Main term (T/2pi) ln(T/(2 pi e)) + 7/8 of the zero counting function."""
    T = np.asarray(T, dtype=float)
    return T / TWO_PI * np.log(T / (TWO_PI * math.e)) + 0.875


# ---------------------------------------------------------------------------
# zeros

def _anchor_points(j_lo: int, j_hi: int):
    """Gram ordinates for indices j_lo..j_hi; index -1 maps to t = 10."""
    js = np.arange(max(j_lo, 0), j_hi + 1)
    ts = gram_batch(js, 0.0).t if js.size else np.empty(0)
    if j_lo <= -1:
        js = np.concatenate(([-1], js))
        ts = np.concatenate(([_LOW_ANCHOR], ts))
    return js, ts


def _good_bounds(T1: float, T2: float):
    """Good Gram indices j0 <= A(T1) and j1 > A(T2), with all Gram data between."""
    a1, a2 = (float(x) for x in gram_index_bounds([max(T1, 18.0), T2], 0.0))
    j_lo = int(math.floor(a1)) if T1 >= 18.0 else -1
    j_hi = int(math.floor(a2)) + 1
    pad = 8
    while True:
        js, ts = _anchor_points(max(j_lo - pad, -1), j_hi + pad)
        zs = hz(ts)
        good = np.where(js % 2 == 0, zs, -zs) > 0
        below = np.nonzero(good & (js <= j_lo))[0]
        above = np.nonzero(good & (js >= j_hi))[0]
        if below.size and above.size:
            i0, i1 = below[-1], above[0]
            return js[i0:i1 + 1], ts[i0:i1 + 1], zs[i0:i1 + 1], good[i0:i1 + 1]
        pad *= 2


def _sign_changes(z: np.ndarray) -> np.ndarray:
    s = np.signbit(z)
    return np.nonzero(s[1:] != s[:-1])[0]


def _refine_blocks(blocks):
    """Subdivide deficient blocks until their sign-change count is met."""
    level = 1
    while level < MAX_SUBDIVISION:
        todo = [b for b in blocks if _sign_changes(b["z"]).size < b["expected"]]
        if not todo:
            return
        mids = [0.5 * (b["t"][1:] + b["t"][:-1]) for b in todo]
        zm = hz(np.concatenate(mids))
        pos = 0
        for b, m in zip(todo, mids):
            zmid = zm[pos:pos + m.size]
            pos += m.size
            t = np.empty(b["t"].size + m.size)
            z = np.empty_like(t)
            t[0::2], t[1::2] = b["t"], m
            z[0::2], z[1::2] = b["z"], zmid
            b["t"], b["z"] = t, z
        level *= 2


def _bisect_brackets(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, tol: float = ZERO_TOL):
    lo, hi = lo.copy(), hi.copy()
    neg_lo = np.signbit(zlo)
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        same = np.signbit(hz(mid)) == neg_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi), hi - lo


def find_zeros(T1: float, T2: float, *, validate: bool = True) -> ZeroList:
    """All critical-line zero ordinates with T1 <= gamma <= T2, to 1e-8.

    Raises MissingZeroError if the count differs from the Riemann-von
    Mangoldt main term by more than two.
    """
    T1, T2 = float(T1), float(T2)
    if not (10.0 <= T1 < T2 <= MAX_HEIGHT):
        raise DomainError("need 10 <= T1 < T2 <= 1e7")
    js, ts, zs, good = _good_bounds(T1, T2)
    gi = np.nonzero(good)[0]
    blocks = []
    for a, b in zip(gi[:-1], gi[1:]):
        blocks.append({"j": int(js[a]), "expected": int(js[b] - js[a]),
                       "t": ts[a:b + 1].copy(), "z": zs[a:b + 1].copy()})
    _refine_blocks(blocks)

    lo_l, hi_l, z_l, idx_l = [], [], [], []
    for b in blocks:
        k = _sign_changes(b["z"])
        lo_l.append(b["t"][k])
        hi_l.append(b["t"][k + 1])
        z_l.append(b["z"][k])
        # with S(g_j) = 0 at the good point, N(g_j) = j + 1
        idx_l.append(b["j"] + 2 + np.arange(k.size))
    lo = np.concatenate(lo_l) if lo_l else np.empty(0)
    hi = np.concatenate(hi_l) if hi_l else np.empty(0)
    zlo = np.concatenate(z_l) if z_l else np.empty(0)
    idx = np.concatenate(idx_l).astype(np.int64) if idx_l else np.empty(0, np.int64)
    keep = (hi >= T1) & (lo <= T2)
    gam, width = _bisect_brackets(lo[keep], hi[keep], zlo[keep])
    idx = idx[keep]
    inside = (gam >= T1) & (gam <= T2)
    gam, width, idx = gam[inside], width[inside], idx[inside]

    if validate:
        expected = float(riemann_von_mangoldt(T2) - riemann_von_mangoldt(max(T1, _LOW_ANCHOR)))
        if T1 <= _LOW_ANCHOR:
            expected = float(riemann_von_mangoldt(T2))
        if abs(gam.size - expected) > COUNT_SLACK:
            raise MissingZeroError(
                f"found {gam.size} zeros in [{T1:g}, {T2:g}], main term predicts {expected:.2f}")
    return ZeroList(gam, T1, T2, indices=idx, widths=width)


def eta(t: float, zeros) -> float:
    """Distance from t to the nearest zero ordinate; zeros must cover [t-2, t+2]."""
    zl = as_zero_list(zeros)
    zl.require(t - 2.0, t + 2.0)
    return float(zl.nearest_distance(t))


def near_zero_mask(t, radius, *, grid: int = 9) -> np.ndarray:
    """True where Z changes sign on a ``grid``-point mesh of [t - r, t + r].

    A cheap local stand-in for eta_t < r when a full zero list would be too
    large.  It misses a pair of zeros closer together than 2r/(grid - 1)
    that both fall inside the window, which at these heights is rare.
    """
    t = np.asarray(t, dtype=float).reshape(-1)
    r = np.broadcast_to(np.asarray(radius, dtype=float), t.shape)
    offs = np.linspace(-1.0, 1.0, grid)
    pts = t[:, None] + r[:, None] * offs[None, :]
    z = hz(pts.reshape(-1)).reshape(pts.shape)
    s = np.signbit(z)
    return np.any(s[:, 1:] != s[:, :-1], axis=1) | np.any(z == 0.0, axis=1)


# ---------------------------------------------------------------------------
# a-points

SIGMA_LEFT = -0.5
SIGMA_RIGHT = 6.0
SIGMA_RIGHT_NEAR_ONE = 12.0
PROXIMITY = 1e-6
APOINT_TOL = 1e-7
DEDUP = 1e-5
SUBRANGE = 1e3
_GRID_SIGMAS = (0.25, 0.75, 1.5, 3.0)


@dataclass(frozen=True)
class APoint:
    a: complex
    beta: float
    gamma: float
    residual: float
    seed_kind: str  # "gram", "midpoint" or "grid"


@dataclass(frozen=True)
class APointCount:
    a: complex
    T: float
    count: int
    main_term: float
    T_used: float = field(default=float("nan"))  # contour height after any retry

    @property
    def deviation(self) -> float:
        return self.count - self.main_term


def apoint_main_term(a: complex, T: float) -> float:
    """(T/2pi) ln(T/2pi) - T/2pi, with an extra -(ln 2) T/2pi when a = 1."""
    x = T / TWO_PI
    m = x * math.log(x) - x
    if complex(a) == 1:
        m -= math.log(2.0) * x
    return m


def _right_edge(a: complex) -> float:
    return SIGMA_RIGHT_NEAR_ONE if abs(complex(a) - 1) < 0.1 else SIGMA_RIGHT


def _edge(p0: complex, p1: complex, h: float) -> np.ndarray:
    n = max(2, int(math.ceil(abs(p1 - p0) / h)) + 1)
    return p0 + (p1 - p0) * np.linspace(0.0, 1.0, n)


def _contour_values(pts: np.ndarray, a: complex) -> np.ndarray:
    return chunked_eval(zeta, pts, chunk=4000) - a


def winding_number(a: complex, sigma_lo: float, sigma_hi: float, t_lo: float, t_hi: float,
                   *, resolution: float = 1.0) -> int:
    """Number of roots of zeta(s) = a inside the open rectangle.

    The boundary is sampled so that consecutive values of zeta - a subtend
    less than pi/2 and the chord between them stays away from the origin.
    ``resolution`` < 1 shrinks the initial step (used to check invariance).
    """
    a = complex(a)
    rate = max(1.0, math.log(max(t_hi, TWO_PI) / TWO_PI))
    h = resolution / rate
    corners = [complex(sigma_lo, t_lo), complex(sigma_hi, t_lo),
               complex(sigma_hi, t_hi), complex(sigma_lo, t_hi)]
    pieces = [_edge(corners[i], corners[(i + 1) % 4], h)[:-1] for i in range(4)]
    s = np.concatenate(pieces + [corners[:1]])
    f = _contour_values(s, a)
    for _ in range(60):
        if np.min(np.abs(f)) < PROXIMITY:
            k = int(np.argmin(np.abs(f)))
            raise BoundaryProximityError(f"|zeta - a| < {PROXIMITY:g} at s = {s[k]:.6g}")
        d = np.angle(f[1:] / f[:-1])
        chord = np.abs(f[1:] - f[:-1]) > np.minimum(np.abs(f[1:]), np.abs(f[:-1]))
        bad = np.nonzero((np.abs(d) >= 0.5 * math.pi) | chord)[0]
        if bad.size == 0:
            total = d.sum() / (2 * math.pi)
            n = int(round(total))
            if abs(total - n) > 1e-6:
                raise ConvergenceError(f"winding sum {total} is not an integer")
            return n
        mid = 0.5 * (s[bad] + s[bad + 1])
        fm = _contour_values(mid, a)
        s = np.insert(s, bad + 1, mid)
        f = np.insert(f, bad + 1, fm)
    raise ConvergenceError("contour refinement did not settle")


def count_apoints(a: complex, T: float, *, retries: int = 3) -> APointCount:
    """N_a(T): a-points with 1 < gamma <= T in the strip, by the argument principle."""
    a = complex(a)
    if a == 0:
        raise DomainError("a = 0 is excluded")
    T = float(T)
    if not (1e2 <= T <= 1e4):
        raise DomainError("count_apoints needs 1e2 <= T <= 1e4")
    right = _right_edge(a)
    T_used = T
    for attempt in range(retries + 1):
        try:
            n = winding_number(a, SIGMA_LEFT, right, 1.0, T_used)
            break
        except BoundaryProximityError:
            if attempt == retries:
                raise
            T_used = T + (attempt + 1) * (1 if attempt % 2 == 0 else -1)
    return APointCount(a, T, n, apoint_main_term(a, T), T_used)


def _newton(a: complex, s0: np.ndarray, kinds: np.ndarray, t_lo: float, t_hi: float, right: float,
            max_iter: int = 40):
    s = s0.astype(complex)
    active = np.ones(s.size, dtype=bool)
    conv = np.zeros(s.size, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        f, df = zeta_with_derivative(s[idx])
        f = f - a
        step = f / df
        step = np.where(np.abs(step) > 1.0, step / np.abs(step), step)
        s_new = s[idx] - step
        s[idx] = s_new
        # |f| sits at rounding level once the root is reached; one more
        # step from there has already been taken
        done = (np.abs(f) <= 1e-11) | (np.abs(step) <= 1e-12 * np.abs(s_new))
        lost = ((s_new.real <= SIGMA_LEFT - 1.0) | (s_new.real >= right + 2.0)
                | (s_new.imag < t_lo - 5.0) | (s_new.imag > t_hi + 5.0)
                | ~np.isfinite(s_new))
        conv[idx[done & ~lost]] = True
        active[idx[done | lost]] = False
    ok = conv.copy()
    s_ok = s[ok]
    res = np.abs(zeta(s_ok) - a) if s_ok.size else np.empty(0)
    good = res <= APOINT_TOL
    return s_ok[good], res[good], kinds[ok][good]


def _dedup(s: np.ndarray, res: np.ndarray, kinds: np.ndarray):
    order = np.lexsort((s.real, s.imag))
    s, res, kinds = s[order], res[order], kinds[order]
    keep = []
    for i in range(s.size):
        dup = False
        for j in reversed(keep):
            if s[i].imag - s[j].imag > DEDUP:
                break
            if abs(s[i] - s[j]) <= DEDUP:
                dup = True
                break
        if not dup:
            keep.append(i)
    keep = np.array(keep, dtype=int)
    return s[keep], res[keep], kinds[keep]


def _seeds(a: complex, T1: float, T2: float):
    phi = phase_of(a)
    lo = max(T1 - 1.0, 10.0)
    grams = grams_in_range(lo, T2 + 1.0, phi, min_height=10.0).t if T2 + 1.0 > lo else np.empty(0)
    # below the first usable Gram point a plain grid stands in
    low_t = np.arange(max(T1, 1.0), min(T2, grams[0] if grams.size else T2) + 0.5, 0.5)
    mids = 0.5 * (grams[1:] + grams[:-1])
    tg = np.concatenate((grams, mids, low_t))
    seeds = [0.5 + 1j * grams, 0.5 + 1j * mids, 0.5 + 1j * low_t]
    kinds = [np.full(grams.size, "gram"), np.full(mids.size, "midpoint"), np.full(low_t.size, "grid")]
    for sg in _GRID_SIGMAS:
        seeds.append(sg + 1j * tg)
        kinds.append(np.full(tg.size, "grid"))
    return np.concatenate(seeds), np.concatenate(kinds)


def _dense_seeds(t_lo: float, t_hi: float, right: float):
    ts = np.arange(t_lo, t_hi, 0.1)
    ss = np.linspace(SIGMA_LEFT + 0.2, min(right, 4.0), 12)
    s = (ss[None, :] + 1j * ts[:, None]).reshape(-1)
    return s, np.full(s.size, "grid")


def _subrange_edges(T1: float, T2: float) -> np.ndarray:
    n = max(1, int(math.ceil((T2 - T1) / SUBRANGE)))
    return np.linspace(T1, T2, n + 1)


def _count_in(a, right, t_lo, t_hi):
    """Winding count on [left, right] x [t_lo, t_hi], nudging the horizontal
    edges when they pass too close to an a-point."""
    for nudge in (0.0, 0.013, -0.017, 0.029, -0.031):
        try:
            lo = t_lo + (nudge if t_lo > 1.0 else 0.0)
            hi = t_hi + nudge
            return winding_number(a, SIGMA_LEFT, right, lo, hi), lo, hi
        except BoundaryProximityError:
            continue
    raise BoundaryProximityError(f"cannot place a contour edge near [{t_lo:g}, {t_hi:g}]")


def find_apoints(a: complex, T1: float, T2: float, *, check: bool = True) -> list[APoint]:
    """Nontrivial a-points with T1 < gamma <= T2 located by complex Newton.

    Seeds sit at 1/2 + ig for every shifted Gram point of phase arg(a), at
    the midpoints between them, and on the lines sigma = 0.25, 0.75, 1.5, 3.
    With ``check`` the result is compared with argument-principle counts on
    subranges of height <= 1000; missing subranges are reseeded densely and
    any remaining shortfall is reported by IncompleteCaptureWarning.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("a = 0 is excluded")
    T1, T2 = float(T1), float(T2)
    if not (1.0 <= T1 < T2 <= 1e5):
        raise DomainError("find_apoints needs 1 <= T1 < T2 <= 1e5")
    right = _right_edge(a)
    s0, kinds = _seeds(a, T1, T2)
    s, res, kinds = _newton(a, s0, kinds, T1, T2, right)
    s, res, kinds = _dedup(s, res, kinds)

    if check:
        gaps = []
        for t_lo, t_hi in zip(*(lambda e: (e[:-1], e[1:]))(_subrange_edges(T1, T2))):
            expected, lo, hi = _count_in(a, right, t_lo, t_hi)
            inside = _in_rect(s, right, lo, hi)
            if inside.sum() < expected:
                extra, eres, ekinds = _newton(a, *_dense_seeds(lo, hi, right), lo, hi, right)
                s, res, kinds = _dedup(np.concatenate((s, extra)), np.concatenate((res, eres)),
                                       np.concatenate((kinds, ekinds)))
                inside = _in_rect(s, right, lo, hi)
                if inside.sum() < expected:
                    gaps.append((lo, hi, int(expected - inside.sum())))
        if gaps:
            where = ", ".join(f"[{lo:.2f}, {hi:.2f}]: {k}" for lo, hi, k in gaps)
            warnings.warn(f"a-points missing relative to the argument principle: {where}",
                          IncompleteCaptureWarning, stacklevel=2)

    sel = (s.imag > T1) & (s.imag <= T2) & (s.real > SIGMA_LEFT) & (s.real < right)
    return [APoint(a, float(p.real), float(p.imag), float(r), str(k))
            for p, r, k in zip(s[sel], res[sel], kinds[sel])]


def _in_rect(s, right, lo, hi):
    return (s.real > SIGMA_LEFT) & (s.real < right) & (s.imag > lo) & (s.imag < hi)


def online_apoint_test(a: complex, g: ShiftedGramPoint, tol: float) -> bool:
    """Necessary condition for an a-point on the line at g: ||zeta(1/2+ig)| - |a|| <= tol."""
    a = complex(a)
    if abs(g.phi - phase_of(a)) > 1e-12:
        raise DomainError("Gram point phase differs from arg(a)")
    return bool(abs(abs(float(hardy_z(g.t))) - abs(a)) <= tol)


def online_hits(a: complex, t: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised ``online_apoint_test`` over shifted Gram ordinates t."""
    return np.abs(np.abs(hz(t)) - abs(complex(a))) <= tol


def theta_phase_residual(a: complex, gamma) -> np.ndarray:
    """Distance of theta(gamma) + arg(a) from the lattice pi Z."""
    x = (np.asarray(riemann_siegel_theta(np.asarray(gamma, dtype=float))) + phase_of(a)) / math.pi
    return math.pi * np.abs(x - np.round(x))
