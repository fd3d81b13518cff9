"""The smoothed prime-sum approximation to log|zeta(1/2 + it)| and its error terms.

Notation: w_X(n) is the weight that equals 1 up to X and decays to 0 at X^3;
sigma_{X,t} = 1/2 + 2 max(beta - 1/2, 2/ln X) over zeros near t; F(t; X) is
the factor that blows up logarithmically as t approaches a zero ordinate.
The error terms E1, E2, E3 and the Dirichlet integral are evaluated exactly
as finite sums, so every piece of the error budget is a concrete number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._zerolist import as_zero_list
from .errors import DomainError, SaturatedError
from .gram import ShiftedGramPoint
from .special_fn import PrimeTable, hardy_z, log_abs_zeta

ZERO_GUARD = 1e-8       # ordinates are known to this accuracy
HOUGH_GUARD = 1e-6
# Pilot-calibrated constant for Hough's inequality.  Over 1000 g* points in
# (1e5, 2e5] at X = 100 (seed 0) the smallest margin rhs - lhs was +2.84, so
# the inequality held with the O(1) term dropped and no slack is needed.
HOUGH_C0 = 0.0
DIRICHLET_SPAN = 40.0   # integrate u over [1/2, 1/2 + SPAN / ln X]
_GL_NODES = 10
_PRIME_CHUNK = 8192
_T_CHUNK = 256


class _Saturated:
    """F at a zero ordinate, where the ln+ term is infinite."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "SATURATED"

    def __reduce__(self):
        return (_Saturated, ())


SATURATED = _Saturated()


# ---------------------------------------------------------------------------
# weights and sigma_{X,t}

def _check_X(X: float) -> float:
    X = float(X)
    if not X >= 2.0:
        raise DomainError("X must be at least 2")
    return X


def weight_w(n, X: float):
    """w_X(n): 1 for n <= X, quadratic in ln n down to 0 at X^3."""
    X = _check_X(X)
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 1):
        raise DomainError("n must be >= 1")
    L = math.log(X)
    ln = np.log(arr)
    a = 3 * L - ln     # ln(X^3 / n)
    b = 2 * L - ln     # ln(X^2 / n)
    out = np.where(arr <= X, 1.0,
                   np.where(arr <= X * X, (a * a - 2 * b * b) / (2 * L * L),
                            np.where(arr <= X ** 3, a * a / (2 * L * L), 0.0)))
    return float(out) if np.ndim(n) == 0 else out


def _window_radius(beta, X):
    return X ** (3 * np.abs(np.asarray(beta) - 0.5)) / math.log(X)


def sigma_Xt(t: float, X: float, zeros) -> float:
    """1/2 + 2 max(beta - 1/2, 2/ln X) over zeros with |t - gamma| <= X^{3|beta-1/2|}/ln X."""
    X = _check_X(X)
    zl = as_zero_list(zeros)
    L = math.log(X)
    reach = float(_window_radius(np.max(zl.betas), X)) if len(zl) else 1.0 / L
    reach = max(reach, float(_window_radius(np.min(zl.betas), X)) if len(zl) else reach)
    zl.require(t - reach - 1.0, t + reach + 1.0)
    m = 2.0 / L
    sl = zl.window(t - reach, t + reach)
    g, b = zl.gammas[sl], zl.betas[sl]
    inside = np.abs(t - g) <= _window_radius(b, X)
    if np.any(inside):
        m = max(m, float(np.max(b[inside] - 0.5)))
    return 0.5 + 2.0 * m


def _F_value(sigma, eta, X):
    L = math.log(X)
    d = sigma - 0.5
    with np.errstate(divide="ignore"):
        lnplus = np.maximum(0.0, -np.log(eta * L))
    return (X ** (-d / 2) / L + d) * (d * L + lnplus)


def F_term(t: float, X: float, zeros):
    """F(t; X), or SATURATED when t sits on a zero ordinate."""
    X = _check_X(X)
    zl = as_zero_list(zeros)
    zl.require(t - 2.0, t + 2.0)
    s = sigma_Xt(t, X, zl)
    eta = float(zl.nearest_distance(t))
    if eta < ZERO_GUARD:
        return SATURATED
    return float(_F_value(s, eta, X))


# ---------------------------------------------------------------------------
# prime sums

def _require_table(table: PrimeTable, x: float) -> None:
    if not table.covers(x):
        raise DomainError(f"prime table stops at {table.limit}, need {math.floor(x)}")


def _cos_sum(t: np.ndarray, logs: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """sum_k coef_k cos(t log_k) for each t, in fixed ascending order."""
    out = np.zeros(t.size)
    for i in range(0, t.size, _T_CHUNK):
        tt = t[i:i + _T_CHUNK]
        acc = np.zeros(tt.size)
        for j in range(0, logs.size, _PRIME_CHUNK):
            acc += (np.cos(np.outer(tt, logs[j:j + _PRIME_CHUNK])) * coef[j:j + _PRIME_CHUNK]).sum(axis=1)
        out[i:i + _T_CHUNK] = acc
    return out


def _exp_sum(t: np.ndarray, logs: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """sum_k coef_k exp(-i t log_k) for each t (complex)."""
    out = np.zeros(t.size, dtype=complex)
    for i in range(0, t.size, _T_CHUNK):
        tt = t[i:i + _T_CHUNK]
        acc = np.zeros(tt.size, dtype=complex)
        for j in range(0, logs.size, _PRIME_CHUNK):
            ph = np.outer(tt, logs[j:j + _PRIME_CHUNK])
            c = coef[j:j + _PRIME_CHUNK]
            acc += (np.cos(ph) * c).sum(axis=1) - 1j * (np.sin(ph) * c).sum(axis=1)
        out[i:i + _T_CHUNK] = acc
    return out


def prime_sum(t, X: float, table: PrimeTable):
    """sum over p <= X^3 of cos(t ln p) / sqrt(p), summed in ascending p."""
    X = _check_X(X)
    _require_table(table, X ** 3)
    sl = table.upto(X ** 3)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = _cos_sum(tt, table.logs[sl], table.half_powers[sl])
    return float(out[0]) if np.ndim(t) == 0 else out


@lru_cache(maxsize=8)
def _prime_powers(table: PrimeTable, limit: int):
    """(n, log p) for all prime powers p^r <= limit, sorted by n."""
    ns, lg = [], []
    sl = table.upto(limit)
    for p, lp in zip(table.primes[sl].tolist(), table.logs[sl].tolist()):
        q = p
        while q <= limit:
            ns.append(q)
            lg.append(lp)
            q *= p
    order = np.argsort(ns, kind="stable")
    return np.asarray(ns, dtype=float)[order], np.asarray(lg)[order]


def _gl_panels(X: float, panels: int):
    """Gauss-Legendre nodes/weights on [1/2, 1/2 + SPAN/ln X], panels clustered at 1/2."""
    span = DIRICHLET_SPAN / math.log(X)
    edges = 0.5 + span * (np.arange(panels + 1) / panels) ** 2
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x[None, :] + 0.5 * (a + b)).reshape(-1)
    weights = (0.5 * (b - a) * w[None, :]).reshape(-1)
    return nodes, weights, 0.5 + span


def dirichlet_integral(t, X: float, table: PrimeTable, *, panels: int = 24):
    """int_{1/2}^inf X^{1/2-u} |sum_{p<=X^3} ln p ln(pX) w_X(p) p^{-u-it}| du.

    Composite Gauss-Legendre on [1/2, 1/2 + 40/ln X] plus the bound
    S(U) X^{1/2-U} / ln X for the tail, where S(u) = sum ln p ln(pX) w p^{-u}
    majorises the modulus and decreases in u.
    """
    X = _check_X(X)
    _require_table(table, X ** 3)
    sl = table.upto(X ** 3)
    logs = table.logs[sl]
    c = logs * (logs + math.log(X)) * weight_w(table.primes[sl].astype(float), X)
    nodes, weights, U = _gl_panels(X, panels)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros(tt.size)
    for i in range(0, tt.size, _T_CHUNK):
        ti = tt[i:i + _T_CHUNK]
        acc = np.zeros((ti.size, nodes.size), dtype=complex)
        for j in range(0, logs.size, _PRIME_CHUNK):
            lj = logs[j:j + _PRIME_CHUNK]
            decay = np.exp(-np.outer(lj, nodes))                      # p^{-u}
            ph = np.outer(ti, lj)
            v = (np.cos(ph) - 1j * np.sin(ph)) * c[j:j + _PRIME_CHUNK]  # c_p p^{-it}
            acc += v @ decay
        integrand = np.abs(acc) * X ** (0.5 - nodes)
        out[i:i + _T_CHUNK] = integrand @ weights
    tail = float(np.sum(c * np.exp(-U * logs))) * X ** (0.5 - U) / math.log(X)
    out = out + tail
    return float(out[0]) if np.ndim(t) == 0 else out


def error_terms(t, X: float, table: PrimeTable, *, sigma: float | None = None, panels: int = 24):
    """(E1, E2, E3, dirichlet_integral) at t.

    E1 uses sigma, defaulting to 1/2 + 4/ln X (the value of sigma_{X,t} when
    every nearby zero lies on the critical line).
    """
    X = _check_X(X)
    _require_table(table, X ** 3)
    L = math.log(X)
    s = 0.5 + 4.0 / L if sigma is None else float(sigma)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    X3 = X ** 3

    ns, lp = _prime_powers(table, int(math.floor(X3 + 1e-9)))
    c1 = lp * weight_w(ns, X) * ns ** (-s)
    E1 = np.abs(_exp_sum(tt, np.log(ns), c1))

    sl = table.upto(X3)
    p = table.primes[sl].astype(float)
    c2 = (1.0 - weight_w(p, X)) * table.half_powers[sl]
    E2 = np.abs(_exp_sum(tt, table.logs[sl], c2))

    sl3 = table.upto(X ** 1.5)
    p3 = table.primes[sl3].astype(float)
    c3 = weight_w(p3 * p3, X) / p3
    E3 = np.abs(_exp_sum(2.0 * tt, table.logs[sl3], c3))

    DI = np.atleast_1d(dirichlet_integral(tt, X, table, panels=panels))
    if np.ndim(t) == 0:
        return float(E1[0]), float(E2[0]), float(E3[0]), float(DI[0])
    return E1, E2, E3, DI


# ---------------------------------------------------------------------------
# full decomposition

@dataclass(frozen=True)
class ApproxDecomposition:
    t: float
    X: float
    prime_sum: float
    sigma_Xt: float
    F: float
    E1: float
    E2: float
    E3: float
    dirichlet_integral: float
    lhs_half: float
    lhs_sigma: float
    residual_half: float
    residual_sigma: float
    budget: float
    budget_sigma: float


def _budgets(sigma, F, E2, E3, DI, X, lnT):
    d = sigma - 0.5
    L = math.log(X)
    b_half = F * lnT + E2 + E3 + F * X ** d * DI
    b_sigma = ((X ** (-d / 2) / L + d) * lnT + E2 + E3
               + (X ** (d / 2) / L + d * X ** d) * DI)
    return b_half, b_sigma


def decompose_many(ts, X: float, zeros, table: PrimeTable, *, T: float | None = None,
                   panels: int = 24) -> list[ApproxDecomposition]:
    """``decompose`` over many ordinates, sharing the prime-sum work.

    ``T`` fixes the ln T of the error budget; by default ln t is used.
    """
    X = _check_X(X)
    zl = as_zero_list(zeros)
    tt = np.asarray(ts, dtype=float).reshape(-1)
    if tt.size == 0:
        return []
    if np.any(tt <= 10.0):
        raise DomainError("t must exceed 10")
    _require_table(table, X ** 3)
    sig = np.array([sigma_Xt(t, X, zl) for t in tt])
    zl.require(float(tt.min()) - 2.0, float(tt.max()) + 2.0)
    eta = zl.nearest_distance(tt)
    if np.any(eta < ZERO_GUARD):
        k = int(np.argmin(eta))
        raise SaturatedError(f"t = {tt[k]!r} is within {ZERO_GUARD:g} of a zero ordinate")
    F = _F_value(sig, eta, X)
    P = prime_sum(tt, X, table)
    out = []
    uniq = np.unique(sig)
    E1 = np.empty(tt.size)
    E2 = np.empty(tt.size)
    E3 = np.empty(tt.size)
    DI = np.empty(tt.size)
    for s in uniq:
        m = sig == s
        e1, e2, e3, di = error_terms(tt[m], X, table, sigma=float(s), panels=panels)
        E1[m], E2[m], E3[m], DI[m] = e1, e2, e3, di
    lhs_half = np.log(np.abs(np.atleast_1d(hardy_z(tt))))
    lhs_sigma = np.array([float(log_abs_zeta(float(s), t)) for s, t in zip(sig, tt)])
    for k, t in enumerate(tt):
        lnT = math.log(T if T is not None else t)
        b, bs = _budgets(sig[k], F[k], E2[k], E3[k], DI[k], X, lnT)
        out.append(ApproxDecomposition(
            t=float(t), X=X, prime_sum=float(P[k]), sigma_Xt=float(sig[k]), F=float(F[k]),
            E1=float(E1[k]), E2=float(E2[k]), E3=float(E3[k]), dirichlet_integral=float(DI[k]),
            lhs_half=float(lhs_half[k]), lhs_sigma=float(lhs_sigma[k]),
            residual_half=float(lhs_half[k] - P[k]), residual_sigma=float(lhs_sigma[k] - P[k]),
            budget=float(b), budget_sigma=float(bs)))
    return out


def decompose(t: float, X: float, zeros, table: PrimeTable, *, T: float | None = None,
              panels: int = 24) -> ApproxDecomposition:
    """Every term of the approximate formula at one ordinate t.

    ``budget`` is F ln T + E2 + E3 + F X^{sigma-1/2} * dirichlet_integral,
    the quantity |residual_half| is compared against; ``budget_sigma`` is the
    matching expression for the formula at sigma_{X,t}.
    """
    return decompose_many([t], X, zeros, table, T=T, panels=panels)[0]


def hough_check(g: ShiftedGramPoint | float, X: float, zeros, *, sigma: float | None = None):
    """(lhs, rhs, margin) for log|zeta(1/2+it)| <= log|zeta(sigma+it)| + (sigma-1/2)(ln t)/2.

    The O(1) constant is set to 0, so margin = rhs - lhs measures it.
    ``sigma`` overrides sigma_{X,t}.
    """
    t = float(g.t if isinstance(g, ShiftedGramPoint) else g)
    if t <= 10.0:
        raise DomainError("t must exceed 10")
    zl = as_zero_list(zeros)
    zl.require(t - 2.0, t + 2.0)
    if float(zl.nearest_distance(t)) <= HOUGH_GUARD:
        raise SaturatedError(f"t = {t!r} is within {HOUGH_GUARD:g} of a zero ordinate")
    s = sigma_Xt(t, _check_X(X), zl) if sigma is None else float(sigma)
    lhs = float(log_abs_zeta(0.5, t))
    rhs = float(log_abs_zeta(s, t)) + 0.5 * (s - 0.5) * math.log(t)
    return lhs, rhs, rhs - lhs
