"""Value distribution of log|zeta| at shifted Gram points and related statistics.

Covers the normalised distribution log|zeta(1/2+ig)| / sqrt(Psi) with
Psi = (1/2) ln ln T, its characteristic function against the random model
prod J0(u / sqrt(p Psi)), moments of the prime sum, exponential sums over
Gram points, pair correlation of zeros and the Hypothesis S pair count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from ._zerolist import as_zero_list
from .errors import CapacityError, CoverageError, DomainError
from .gram import gram_batch, gram_index_bounds, grams_in_range, star_threshold
from .special_fn import PrimeTable, bessel_j0
from .zeros_apoints import hz, near_zero_mask

MAX_MOMENT = 8
MAX_MODEL_PRIMES = 10_000
_TIME_AVG_BUDGET = 3e9   # nodes x primes


def psi(T: float) -> float:
    """Psi = (1/2) ln ln T."""
    return 0.5 * math.log(math.log(T))


# ---------------------------------------------------------------------------
# distribution at Gram points

@dataclass(frozen=True, eq=False)
class DistSummary:
    T: float
    phi: float
    sample_count: int
    values: np.ndarray         # sorted normalised values
    ks_distance: float
    mean: float
    variance: float
    psi: float
    drawn: int                 # Gram points sampled before exclusion
    excluded_fraction: float   # share dropped as lying near a zero
    index: np.ndarray          # per retained point, in index order
    g: np.ndarray
    log_abs_zeta: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistSummary):
            return NotImplemented
        return (self.T == other.T and self.phi == other.phi and self.drawn == other.drawn
                and np.array_equal(self.index, other.index)
                and np.array_equal(self.log_abs_zeta, other.log_abs_zeta))

    def ecdf(self, v) -> np.ndarray:
        return np.searchsorted(self.values, np.asarray(v, dtype=float), side="right") / self.values.size

    def mass(self, lo: float, hi: float) -> float:
        """Empirical mass of [lo, hi]."""
        i = np.searchsorted(self.values, lo, side="left")
        j = np.searchsorted(self.values, hi, side="right")
        return float(j - i) / self.values.size


def ks_normal(sorted_values: np.ndarray) -> float:
    """Two-sided Kolmogorov-Smirnov distance of a sorted sample to N(0, 1)."""
    x = np.asarray(sorted_values, dtype=float)
    n = x.size
    if n == 0:
        raise DomainError("empty sample")
    cdf = ndtr(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def dist_log_zeta(T: float, phi: float, sample_cap: int, seed: int) -> DistSummary:
    """Sample shifted Gram points in (T, 2T] and summarise log|zeta|/sqrt(Psi).

    Indices are drawn uniformly without replacement from a generator seeded
    with ``seed``.  Points within the g*/g_* threshold of a zero are dropped
    and the dropped share is reported.
    """
    T = float(T)
    if not (1e4 <= T <= 5e6):
        raise DomainError("dist_log_zeta needs 1e4 <= T <= 5e6")
    sample_cap = int(sample_cap)
    if sample_cap < 1000:
        raise DomainError("sample_cap must be at least 1000")
    a1, a2 = gram_index_bounds([T, 2 * T], phi)
    n_lo, n_hi = int(np.floor(a1)) + 1, int(np.floor(a2))
    population = n_hi - n_lo + 1
    rng = np.random.default_rng(seed)
    k = min(sample_cap, population)
    picks = np.sort(rng.choice(population, size=k, replace=False))
    batch = gram_batch(n_lo + picks, phi)
    inside = (batch.t > T) & (batch.t <= 2 * T)
    n, g = batch.n[inside], batch.t[inside]

    near = near_zero_mask(g, star_threshold(g))
    keep = ~near
    n, g = n[keep], g[keep]
    la = np.log(np.abs(hz(g)))
    P = psi(T)
    vals = np.sort(la / math.sqrt(P))
    if vals.size == 0:
        raise DomainError("no star points in the sample")
    return DistSummary(
        T=T, phi=float(phi), sample_count=int(vals.size), values=vals,
        ks_distance=ks_normal(vals), mean=float(np.mean(vals)),
        variance=float(np.var(vals, ddof=1)) if vals.size > 1 else 0.0,
        psi=P, drawn=int(inside.sum()), excluded_fraction=float(near.mean()) if near.size else 0.0,
        index=n, g=g, log_abs_zeta=la)


# ---------------------------------------------------------------------------
# characteristic functions

@dataclass(frozen=True)
class CharFnSample:
    u: float
    empirical: complex
    model_j0: float
    gaussian: float


def char_fn_empirical(u, dist: DistSummary):
    """(1/N) sum_k exp(i u v_k) over the sample."""
    v = dist.values
    if v.size == 0:
        raise DomainError("empty distribution")
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.array([np.mean(np.exp(1j * x * v)) for x in uu])
    return complex(out[0]) if np.ndim(u) == 0 else out


def char_fn_model(u, Y: float, Psi: float, table: PrimeTable):
    """prod over p <= Y of J0(u / sqrt(p Psi))."""
    if Psi <= 0:
        raise DomainError("Psi must be positive")
    if not table.covers(Y):
        raise DomainError(f"prime table stops at {table.limit}, need {Y:g}")
    p = table.primes[table.upto(Y)].astype(float)
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    scale = 1.0 / np.sqrt(p * Psi)
    out = np.array([np.prod(bessel_j0(x * scale)) if p.size else 1.0 for x in uu])
    return float(out[0]) if np.ndim(u) == 0 else out


def char_fn_samples(us, dist: DistSummary, Y: float, table: PrimeTable) -> list[CharFnSample]:
    us = np.asarray(us, dtype=float)
    emp = np.atleast_1d(char_fn_empirical(us, dist))
    mod = np.atleast_1d(char_fn_model(us, Y, dist.psi, table))
    return [CharFnSample(float(u), complex(e), float(m), float(math.exp(-u * u / 2)))
            for u, e, m in zip(us, emp, mod)]


# ---------------------------------------------------------------------------
# moments of the prime sum

def _cos_moment(k: int) -> float:
    """int_0^1 cos(2 pi x)^k dx."""
    return 0.0 if k % 2 else math.comb(k, k // 2) / 2.0**k


def random_model_moment_exact(m: int, Y: float, table: PrimeTable) -> float:
    """E[(sum_{p<=Y} cos(2 pi theta_p) / sqrt(p))^m] for independent uniform theta_p.

    Multiplies the truncated exponential generating functions of the
    summands prime by prime; every factor has zero odd coefficients, so odd
    moments come out as an exact 0.
    """
    m = int(m)
    if m < 0:
        raise DomainError("m must be >= 0")
    if m > MAX_MOMENT:
        raise CapacityError(f"moments above m = {MAX_MOMENT} are not supported")
    if not table.covers(Y):
        raise DomainError(f"prime table stops at {table.limit}, need {Y:g}")
    p = table.primes[table.upto(Y)]
    if p.size > MAX_MODEL_PRIMES:
        raise CapacityError("more than 10^4 primes")
    fact = [math.factorial(k) for k in range(m + 1)]
    egf = np.zeros(m + 1)
    egf[0] = 1.0
    for q in p.tolist():
        f = np.array([_cos_moment(k) * q ** (-k / 2) / fact[k] for k in range(m + 1)])
        egf = np.convolve(egf, f)[: m + 1]
    return float(egf[m] * fact[m])


def time_average_moment(m: int, Y: float, T: float, table: PrimeTable, *,
                        panel_scale: float = 1.0, nodes: int = 8) -> float:
    """(1/T) int_0^T (sum_{p<=Y} cos(t ln p) / sqrt(p))^m dt.

    Composite Gauss-Legendre with panel width pi/(3 m ln Y) times
    ``panel_scale``; halve ``panel_scale`` to check self-convergence.
    """
    m = int(m)
    if not 0 <= m <= 6:
        raise DomainError("time_average_moment supports 0 <= m <= 6")
    if not (2 <= Y <= 1e3) or not (0 < T <= 1e6):
        raise DomainError("need 2 <= Y <= 1e3 and 0 < T <= 1e6")
    if m == 0:
        return 1.0
    if not table.covers(Y):
        raise DomainError(f"prime table stops at {table.limit}, need {Y:g}")
    sl = table.upto(Y)
    logs, hp = table.logs[sl], table.half_powers[sl]
    width = panel_scale * math.pi / (3 * m * math.log(Y))
    panels = int(math.ceil(T / width))
    if panels * nodes * logs.size > _TIME_AVG_BUDGET:
        raise CapacityError("quadrature too large; lower T, Y or m")
    h = T / panels
    x, w = np.polynomial.legendre.leggauss(nodes)
    xs = 0.5 * h * (x + 1.0)
    ws = 0.5 * h * w
    total = 0.0
    block = max(1, 200_000 // nodes)
    for start in range(0, panels, block):
        left = h * np.arange(start, min(panels, start + block))
        t = (left[:, None] + xs[None, :]).reshape(-1)
        S = np.cos(np.outer(t, logs)) @ hp
        total += float((S.reshape(-1, nodes) ** m @ ws).sum())
    return total / T


# ---------------------------------------------------------------------------
# exponential sums over Gram points

def exp_sum_bound(x: float, T: float) -> float:
    """(T |ln x| / ln T)^{1/2} + (T ln^3 T / |ln x|)^{1/2} + |ln x|."""
    lx = abs(math.log(x))
    lT = math.log(T)
    return math.sqrt(T * lx / lT) + math.sqrt(T * lT**3 / lx) + lx


def exp_sum_over_grams(x: float, T: float, phi: float, *, T2: float | None = None):
    """(sum over T < g <= 2T of x^{ig}, the bound).  ``T2`` replaces 2T."""
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if x == 1.0:
        raise DomainError("x must differ from 1 (the sum would just count Gram points)")
    T = float(T)
    if T > 1e5:
        raise DomainError("exp_sum_over_grams is brute force; T must be <= 1e5")
    g = grams_in_range(T, 2 * T if T2 is None else T2, phi).t
    lx = math.log(x)
    ph = g * lx
    s = complex(math.fsum(np.cos(ph)), math.fsum(np.sin(ph)))
    return s, exp_sum_bound(x, T)


# ---------------------------------------------------------------------------
# zero statistics

@dataclass(frozen=True)
class PairCorrStat:
    T: float
    alpha: float
    beta: float
    normalized_count: float
    gue_value: float
    pairs: int
    zeros: int
    unfolded: bool = False


@dataclass(frozen=True)
class HypSStat:
    T: float
    n: int
    epsilon: float
    normalized: float
    pairs: int


def gue_integral(alpha: float, beta: float, *, epsabs: float = 1e-12) -> float:
    """int_alpha^beta 1 - (sin pi x / pi x)^2 dx, plus 1 if 0 is in [alpha, beta]."""
    if alpha >= beta:
        raise DomainError("alpha must be below beta")
    val, _ = integrate.quad(lambda x: 1.0 - np.sinc(x) ** 2, alpha, beta,
                            epsabs=epsabs, epsrel=1e-12, limit=200,
                            points=[0.0] if alpha < 0.0 < beta else None)
    return val + (1.0 if alpha <= 0.0 <= beta else 0.0)


def pair_correlation(zeros, T: float, alpha: float, beta: float, *,
                     unfold: bool = False) -> PairCorrStat:
    """(1/N(T)) #{ordered pairs gamma, gamma' <= T: 2 pi alpha/ln T <= gamma - gamma' <= 2 pi beta/ln T}.

    With ``unfold`` the gap is scaled by the local density ln(gamma'/2pi)/2pi
    instead of the global ln T / 2pi.
    """
    if alpha >= beta:
        raise DomainError("alpha must be below beta")
    zl = as_zero_list(zeros)
    if zl.lo > 14.0 or zl.hi < T:
        raise CoverageError("pair_correlation needs every zero in (0, T]")
    g = zl.gammas[: zl.window(-np.inf, T).stop]
    N = g.size
    if N == 0:
        raise CoverageError("no zeros below T")
    if unfold:
        scale = 2 * math.pi / np.log(g / (2 * math.pi))
    else:
        scale = np.full(N, 2 * math.pi / math.log(T))
    lo = np.searchsorted(g, g + alpha * scale, side="left")
    hi = np.searchsorted(g, g + beta * scale, side="right")
    pairs = int(np.sum(hi - lo))
    return PairCorrStat(float(T), float(alpha), float(beta), pairs / N,
                        gue_integral(alpha, beta), pairs, N, unfold)


def hypothesis_s_stat(zeros, T: float, n: int, epsilon: float) -> HypSStat:
    """#{gamma, gamma' in (T, 2T]: |(gamma - gamma') ln T / 2pi - n| < eps} / (T ln T)."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    if epsilon < 0:
        raise DomainError("epsilon must be >= 0")
    zl = as_zero_list(zeros)
    zl.require(T, 2 * T)
    g = zl.gammas[zl.window(T, 2 * T)]
    g = g[g > T]
    unit = 2 * math.pi / math.log(T)
    # open window (n - eps, n + eps) in normalised units
    lo = np.searchsorted(g, g + (n - epsilon) * unit, side="right")
    hi = np.searchsorted(g, g + (n + epsilon) * unit, side="left")
    pairs = int(np.sum(np.maximum(hi - lo, 0)))
    return HypSStat(float(T), n, float(epsilon), pairs / (T * math.log(T)), pairs)
