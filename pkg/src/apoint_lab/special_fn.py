"""Special functions: Riemann-Siegel theta, Hardy's Z, zeta in the strip,
Lambert W, Bessel J0 and a prime table.

Everything here is double precision and vectorised over numpy arrays.  A
few routines also accept ``np.longdouble`` input (``theta_ext``,
``lambert_w0``) because shifted Gram points at t ~ 1e6 need more than 53
bits to pin theta(t) to 1e-9.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sps

from .errors import CapacityError, DomainError, PoleError, PrecisionWarning

TWO_PI = 2.0 * math.pi
LOG_PI = math.log(math.pi)

# Below this height Z is evaluated from the Euler-Maclaurin zeta; the
# Riemann-Siegel remainder with C0..C4 is < 1e-7 above it.
RS_CUTOFF = 200.0
MAX_HEIGHT = 1.0e7


def _scalar_or_array(x, out):
    if np.ndim(x) == 0:
        return out.reshape(()).item() if out.dtype != np.longdouble else out.reshape(())[()]
    return out.reshape(np.shape(x))


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n (B_1 = +1/2 convention, unused here)."""
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


# theta(t) ~ t/2 log(t/2pi) - t/2 - pi/8 + sum_k c_k t^{1-2k}
_THETA_TERMS = 8
_THETA_COEFFS = [
    (1 - Fraction(1, 2 ** (2 * k - 1))) * abs(bernoulli(2 * k)) / (4 * k * (2 * k - 1))
    for k in range(1, _THETA_TERMS + 1)
]


def _theta_asymptotic(t: np.ndarray) -> np.ndarray:
    dt = t.dtype
    pi = np.arctan(np.ones((), dtype=dt)) * 4
    out = 0.5 * t * np.log(t / (2 * pi)) - 0.5 * t - pi / 8
    inv = 1 / t
    inv2 = inv * inv
    corr = np.zeros_like(t)
    for c in reversed(_THETA_COEFFS):
        corr = corr * inv2 + dt.type(c.numerator) / dt.type(c.denominator)
    return out + corr * inv


def riemann_siegel_theta(t):
    """theta(t) = arg Gamma(1/4 + it/2) - (t/2) log pi, odd in t.

    |t| >= 10 uses the Stirling expansion with eight correction terms
    (error < 1e-14 there); smaller |t| goes through the complex log-gamma.
    """
    x = np.atleast_1d(np.asarray(t, dtype=float)).reshape(-1)
    a = np.abs(x)
    out = np.empty_like(a)
    big = a >= 10.0
    if np.any(big):
        out[big] = _theta_asymptotic(a[big])
    small = ~big
    if np.any(small):
        s = a[small]
        out[small] = sps.loggamma(0.25 + 0.5j * s).imag - 0.5 * s * LOG_PI
    out = np.where(x < 0, -out, out)
    out[x == 0] = 0.0
    return _scalar_or_array(t, out)


def theta_ext(t) -> np.ndarray:
    """theta(t) in extended precision for t >= 10 (asymptotic series only)."""
    x = np.asarray(t, dtype=np.longdouble)
    if np.any(x < 10):
        raise DomainError("theta_ext needs t >= 10")
    return _theta_asymptotic(x)


def theta_derivative(t):
    """theta'(t) = 1/2 log(t/2pi) - 1/(48 t^2) - ...

    For t >= 10 this is the term-wise derivative of the asymptotic series;
    below 10 it falls back to the digamma function.
    """
    x = np.atleast_1d(np.asarray(t)).reshape(-1)
    dt = x.dtype if x.dtype == np.longdouble else np.dtype(float)
    x = x.astype(dt)
    out = np.empty_like(x)
    big = x >= 10
    if np.any(big):
        tb = x[big]
        pi = np.arctan(np.ones((), dtype=dt)) * 4
        inv2 = 1 / (tb * tb)
        corr = np.zeros_like(tb)
        for k in range(_THETA_TERMS, 0, -1):
            c = _THETA_COEFFS[k - 1] * (2 * k - 1)
            corr = corr * inv2 + dt.type(c.numerator) / dt.type(c.denominator)
        out[big] = 0.5 * np.log(tb / (2 * pi)) - corr * inv2
    if np.any(~big):
        ts = np.abs(x[~big]).astype(float)
        out[~big] = 0.5 * sps.psi(0.25 + 0.5j * ts).real - 0.5 * LOG_PI
    return _scalar_or_array(t, out)


# ---------------------------------------------------------------------------
# Riemann-Siegel remainder coefficients
#
# Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) is entire.  With
# x = p - 1/2 it equals -cos(2 pi x^2 - 5 pi / 8) / cos(2 pi x); its Taylor
# coefficients come from an FFT on the circle |x| = 1.

def _psi_taylor(degree: int = 96, radius: float = 1.0, nodes: int = 512) -> np.ndarray:
    z = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = -np.cos(2 * np.pi * z * z - 5 * np.pi / 8) / np.cos(2 * np.pi * z)
    coef = np.fft.fft(vals).real / nodes
    coef = coef[: degree + 1] / radius ** np.arange(degree + 1)
    coef[1::2] = 0.0
    return coef


def _deriv_poly(coef: np.ndarray, m: int) -> np.ndarray:
    out = coef.copy()
    for _ in range(m):
        out = np.polynomial.polynomial.polyder(out)
    return out


def _rs_coefficient_polys() -> list[np.ndarray]:
    a = _psi_taylor()
    d = [_deriv_poly(a, m) for m in range(13)]
    pi2, pi4, pi6, pi8 = (np.pi ** k for k in (2, 4, 6, 8))
    P = np.polynomial.polynomial

    def comb(*pairs):
        out = np.zeros(1)
        for c, poly in pairs:
            out = P.polyadd(out, c * poly)
        return out

    c0 = d[0]
    c1 = comb((-1 / (96 * pi2), d[3]))
    c2 = comb((1 / (64 * pi2), d[2]), (1 / (18432 * pi4), d[6]))
    c3 = comb((-1 / (64 * pi2), d[1]), (-1 / (3840 * pi4), d[5]), (-1 / (5308416 * pi6), d[9]))
    c4 = comb(
        (1 / (128 * pi2), d[0]),
        (19 / (24576 * pi4), d[4]),
        (11 / (5898240 * pi6), d[8]),
        (1 / (2038431744 * pi8), d[12]),
    )
    return [c0, c1, c2, c3, c4]


_RS_POLYS = _rs_coefficient_polys()

_BLOCK_ELEMS = 2_000_000


def _rs_main_sum(t: np.ndarray, theta: np.ndarray, nterms: np.ndarray) -> np.ndarray:
    order = np.argsort(t, kind="stable")
    out = np.empty_like(t)
    start = 0
    while start < len(order):
        nmax = int(nterms[order[min(len(order) - 1, start)]])
        rows = max(1, _BLOCK_ELEMS // max(nmax, 1))
        idx = order[start:start + rows]
        nmax = int(nterms[idx].max())
        n = np.arange(1, nmax + 1, dtype=float)
        phase = theta[idx, None] - t[idx, None] * np.log(n)[None, :]
        terms = np.cos(phase) / np.sqrt(n)[None, :]
        terms[n[None, :] > nterms[idx, None]] = 0.0
        out[idx] = 2.0 * terms.sum(axis=1)
        start += rows
    return out


def _z_riemann_siegel(t: np.ndarray, corrections: int = 5) -> np.ndarray:
    a = np.sqrt(t / TWO_PI)
    nterms = np.floor(a)
    frac = a - nterms
    theta = riemann_siegel_theta(t)
    main = _rs_main_sum(t, theta, nterms)
    x = frac - 0.5
    w = 1.0 / a  # (t/2pi)^{-1/2}
    rem = np.zeros_like(t)
    for k in range(min(corrections, 5) - 1, -1, -1):
        rem = rem * w + np.polynomial.polynomial.polyval(x, _RS_POLYS[k])
    sign = np.where(nterms % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    return main + sign * np.sqrt(w) * rem


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t >= 10.

    Riemann-Siegel main sum with the C0..C4 remainder terms above
    ``RS_CUTOFF``; Euler-Maclaurin below it.
    """
    x = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 10.0):
        raise DomainError("hardy_z requires finite t >= 10")
    if np.any(x > MAX_HEIGHT):
        warnings.warn("heights above 1e7 lose accuracy", PrecisionWarning, stacklevel=2)
    flat = x.reshape(-1)
    out = np.empty_like(flat)
    low = flat < RS_CUTOFF
    if np.any(~low):
        out[~low] = _z_riemann_siegel(flat[~low])
    if np.any(low):
        tl = flat[low]
        z = zeta(0.5 + 1j * tl)
        out[low] = (np.exp(1j * riemann_siegel_theta(tl)) * z).real
    return _scalar_or_array(t, out)


# ---------------------------------------------------------------------------
# Euler-Maclaurin zeta

_EM_CORRECTIONS = 20
_EM_RATIO = 0.5  # |t| / (2 pi N)


@lru_cache(maxsize=None)
def _em_coeffs(m: int) -> np.ndarray:
    return np.array(
        [float(bernoulli(2 * k) / math.factorial(2 * k)) for k in range(1, m + 1)]
    )


def default_em_terms(t: float) -> int:
    return max(50, int(math.ceil(abs(t) / (TWO_PI * _EM_RATIO))) + 1)


def _em_block(s: np.ndarray, N: int, m: int, derivative: bool):
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    E = np.exp(-s[:, None] * logn[None, :])
    total = E.sum(axis=1)
    dtotal = -(E * logn[None, :]).sum(axis=1) if derivative else None

    lnN = math.log(N)
    NS = np.exp(-s * lnN)
    sm1 = s - 1.0
    total = total + N * NS / sm1 + 0.5 * NS
    if derivative:
        dtotal = dtotal + N * NS * (-lnN / sm1 - 1.0 / (sm1 * sm1)) - 0.5 * lnN * NS

    coeffs = _em_coeffs(m)
    u = s * NS / N
    du = u * (1.0 / s - lnN) if derivative else None
    N2 = float(N) * N
    for k in range(1, m + 1):
        total = total + coeffs[k - 1] * u
        if derivative:
            dtotal = dtotal + coeffs[k - 1] * du
        a1 = s + (2 * k - 1)
        a2 = s + 2 * k
        r = a1 * a2 / N2
        if derivative:
            du = du * r + u * (a1 + a2) / N2
        u = u * r
    return total, dtotal


def _zeta_em(s: np.ndarray, terms: int | None, corrections: int, derivative: bool):
    val = np.empty_like(s)
    der = np.empty_like(s) if derivative else None
    t_abs = np.abs(s.imag)
    if terms is not None:
        ns = np.full(len(s), int(terms))
    else:
        ns = np.maximum(50, np.ceil(t_abs / (TWO_PI * _EM_RATIO)).astype(int) + 1)
    order = np.argsort(ns, kind="stable")
    start = 0
    while start < len(order):
        # rows x (largest N in the block) stays within the element budget
        rows = max(1, _BLOCK_ELEMS // int(ns[order[start]]))
        while rows > 1:
            last = int(ns[order[min(start + rows, len(order)) - 1]])
            if last * rows <= _BLOCK_ELEMS:
                break
            rows = max(1, _BLOCK_ELEMS // last)
        idx = order[start:start + rows]
        N = int(ns[idx].max())
        v, d = _em_block(s[idx], N, corrections, derivative)
        val[idx] = v
        if derivative:
            der[idx] = d
        start += rows
    return val, der


def _check_zeta_args(s: np.ndarray) -> None:
    if np.any(~np.isfinite(s)):
        raise DomainError("zeta argument must be finite")
    if np.any(s.real <= -2.0) or np.any(s.real >= 30.0):
        raise DomainError("zeta is evaluated only for -2 < Re s < 30")
    if np.any((s.real == 1.0) & (s.imag == 0.0)):
        raise PoleError("zeta has a pole at s = 1")
    if np.any(np.abs(s.imag) > MAX_HEIGHT):
        warnings.warn("heights above 1e7 lose accuracy", PrecisionWarning, stacklevel=3)


def zeta(s, *, terms: int | None = None, corrections: int = _EM_CORRECTIONS):
    """Riemann zeta by Euler-Maclaurin summation.

    ``terms`` defaults to about |Im s|/pi so that the Bernoulli tail shrinks
    geometrically (ratio 1/4 per correction); ``corrections`` is the number
    of Bernoulli terms.  Valid for -2 < Re s < 30 (the contour code needs
    Re s = -1/2).
    """
    z = np.asarray(s, dtype=complex)
    _check_zeta_args(z)
    val, _ = _zeta_em(z.reshape(-1), terms, corrections, False)
    return _scalar_or_array(s, val)


def zeta_with_derivative(s, *, terms: int | None = None, corrections: int = _EM_CORRECTIONS):
    """Return (zeta(s), zeta'(s)) from the same Euler-Maclaurin sum."""
    z = np.asarray(s, dtype=complex)
    _check_zeta_args(z)
    val, der = _zeta_em(z.reshape(-1), terms, corrections, True)
    return _scalar_or_array(s, val), _scalar_or_array(s, der)


def log_abs_zeta(sigma: float, t):
    """log|zeta(sigma + it)|; on sigma = 1/2 this goes through Hardy's Z."""
    if sigma == 0.5:
        return np.log(np.abs(hardy_z(t)))
    return np.log(np.abs(zeta(sigma + 1j * np.asarray(t, dtype=float))))


# ---------------------------------------------------------------------------

def lambert_w0(x):
    """Principal branch W0 on x >= 0 by Halley's iteration from log(1 + x).

    Works in the dtype of ``x`` (float64 or longdouble).
    """
    arr = np.atleast_1d(np.asarray(x)).reshape(-1)
    dt = arr.dtype if arr.dtype == np.longdouble else np.dtype(float)
    z = arr.astype(dt)
    if np.any(~np.isfinite(z)) or np.any(z < 0):
        raise DomainError("lambert_w0 is implemented for finite x >= 0")
    w = np.log1p(z)
    eps = np.finfo(dt).eps
    for _ in range(64):
        ew = np.exp(w)
        f = w * ew - z
        wp1 = w + 1
        dw = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
        w = w - dw
        if np.all(np.abs(dw) <= 4 * eps * (1 + np.abs(w))):
            break
    return _scalar_or_array(x, w)


_J0_SERIES_LIMIT = 10.0


def bessel_j0(z):
    """J0 from its power series sum (-1)^n (z/2)^{2n} / (n!)^2.

    The series is summed until the term drops below 1e-16; for |z| > 10
    cancellation would cost digits, so scipy's J0 is used there.
    """
    x = np.atleast_1d(np.asarray(z, dtype=float)).reshape(-1)
    if np.any(~np.isfinite(x)):
        raise DomainError("bessel_j0 needs finite input")
    out = np.empty_like(x)
    small = np.abs(x) <= _J0_SERIES_LIMIT
    if np.any(small):
        q = -(0.5 * x[small]) ** 2
        term = np.ones_like(q)
        total = term.copy()
        n = 1
        while np.any(np.abs(term) >= 1e-16):
            term = term * q / (n * n)
            total += term
            n += 1
        out[small] = total
    if np.any(~small):
        out[~small] = sps.j0(x[~small])
    return _scalar_or_array(z, out)


# ---------------------------------------------------------------------------

PRIME_LIMIT_MAX = 10**9


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``limit`` with log p and p^{-1/2}, read-only."""

    limit: int
    primes: np.ndarray
    logs: np.ndarray
    half_powers: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def upto(self, x: float) -> slice:
        """Slice selecting primes p <= x."""
        return slice(0, int(np.searchsorted(self.primes, math.floor(x + 1e-9), side="right")))

    def covers(self, x: float) -> bool:
        return self.limit >= math.floor(x + 1e-9)


def primes_up_to(limit: int) -> PrimeTable:
    limit = int(limit)
    if limit < 2:
        raise DomainError("limit must be >= 2")
    if limit > PRIME_LIMIT_MAX:
        raise CapacityError(f"prime table limited to {PRIME_LIMIT_MAX}")
    # odd-only sieve: index i <-> 2i + 1
    size = (limit - 1) // 2 + 1
    sieve = np.ones(size, dtype=bool)
    sieve[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if sieve[i]:
            p = 2 * i + 1
            sieve[p * p // 2::p] = False
    primes = np.concatenate(([2], 2 * np.nonzero(sieve)[0] + 1)).astype(np.int64)
    primes = primes[primes <= limit]
    logs = np.log(primes.astype(float))
    half = 1.0 / np.sqrt(primes.astype(float))
    for arr in (primes, logs, half):
        arr.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes, logs=logs, half_powers=half)
