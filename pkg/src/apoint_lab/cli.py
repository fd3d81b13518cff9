"""Command-line front end: ``apoint-lab <command> [options]``.

Every run writes one data file and one manifest.  CSV output gets a sidecar
``<out>.manifest.json``; JSON output is a single object with ``manifest``
and ``data`` keys.  Data files depend only on the configuration, so two runs
with the same seed produce identical bytes; wall time is kept out of them
(it goes to the sidecar manifest for CSV and to stderr for JSON).

Exit status: 0 success, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.special import ndtr

from . import __version__
from .errors import DomainError, LabError, NumericalError
from .gram import grams_in_range, phase_of, spacing_check, star_threshold
from .special_fn import primes_up_to

COMMANDS = ("gram", "zeros", "apoints", "dist", "approx", "charfn", "moments",
            "expsum", "paircorr", "hyps")

_DEFAULT_SAMPLE = {"dist": 100_000, "charfn": 100_000, "approx": 200}


@dataclass
class RunConfig:
    command: str
    T: float | None = None
    T2: float | None = None
    a_re: float = 2.0
    a_im: float = 0.0
    X: float = 100.0
    Y: float | None = None
    sample_cap: int | None = None
    seed: int = 0
    out_path: str | None = None
    format: str = "json"
    x: float | None = None
    m: int = 4
    n: int = 1
    epsilon: float = 0.05
    alpha: float = 0.5
    beta: float = 1.0

    @property
    def a(self) -> complex:
        return complex(self.a_re, self.a_im)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise DomainError("format must be csv or json")
        if self.command == "expsum":
            if self.x is None:
                raise DomainError("expsum needs --x")
            if self.x == 1.0:
                raise DomainError("expsum requires x != 1 (x = 1 only counts Gram points)")
            if not self.x > 0:
                raise DomainError("expsum requires x > 0")
        if self.T is None or not (math.isfinite(self.T) and self.T > 0):
            raise DomainError("--T must be given as a positive number")
        if self.T2 is not None and not self.T2 > self.T:
            raise DomainError("--T2 must exceed --T")
        if self.a == 0:
            raise DomainError("a must be nonzero")
        if self.command == "paircorr" and not self.alpha < self.beta:
            raise DomainError("paircorr requires alpha < beta")
        if self.sample_cap is not None and self.sample_cap < 1:
            raise DomainError("--sample-cap must be positive")


@dataclass
class RunManifest:
    config: dict
    version: str
    rows: int
    deviations: dict
    summary: dict = field(default_factory=dict)
    wall_time_s: float | None = None

    def as_dict(self, *, with_time: bool) -> dict:
        d = asdict(self)
        if not with_time:
            d.pop("wall_time_s")
        return d


# ---------------------------------------------------------------------------
# pipelines: each returns (columns, rows, summary)

def _zero_list(T1, T2):
    from .zeros_apoints import find_zeros
    return find_zeros(T1, T2)


def _gram(cfg: RunConfig):
    T2 = cfg.T2 or 2 * cfg.T
    b = grams_in_range(cfg.T, T2, phase_of(cfg.a))
    rows = [(int(n), float(t), float(r), float(s))
            for n, t, r, s in zip(b.n, b.t, b.residual, b.seed_gap)]
    summary = {"count": len(b), "max_residual": float(b.residual.max()) if len(b) else 0.0}
    if len(b) > 1 and T2 <= 2 * cfg.T:
        summary["spacing_deviation"] = spacing_check(b, cfg.T)
    return ("n", "t", "residual", "seed_gap"), rows, summary


def _zeros(cfg: RunConfig):
    from .zeros_apoints import riemann_von_mangoldt
    T2 = cfg.T2 or 2 * cfg.T
    zl = _zero_list(cfg.T, T2)
    rows = [(int(i), float(g), float(w)) for i, g, w in zip(zl.indices, zl.gammas, zl.widths)]
    main = float(riemann_von_mangoldt(T2) - riemann_von_mangoldt(cfg.T))
    return ("index", "gamma", "bracket_width"), rows, {"count": len(zl), "main_term": main}


def _apoints(cfg: RunConfig):
    from .zeros_apoints import count_apoints, find_apoints
    lo, hi = (cfg.T, cfg.T2) if cfg.T2 else (1.0, cfg.T)
    pts = find_apoints(cfg.a, lo, hi)
    summary: dict[str, Any] = {"located": len(pts), "range": [lo, hi]}
    if cfg.T2 is None:
        c = count_apoints(cfg.a, cfg.T)
        summary.update(count=c.count, main_term=c.main_term, contour_T=c.T_used)
    rows = [(p.beta, p.gamma, p.residual, p.seed_kind) for p in pts]
    return ("beta", "gamma", "residual", "seed_kind"), rows, summary


def _dist(cfg: RunConfig):
    from .stats import dist_log_zeta
    d = dist_log_zeta(cfg.T, phase_of(cfg.a), cfg.sample_cap, cfg.seed)
    norm = d.log_abs_zeta / math.sqrt(d.psi)
    rows = [(int(i), float(g), float(v), float(z))
            for i, g, v, z in zip(d.index, d.g, d.log_abs_zeta, norm)]
    summary = {"ks_distance": d.ks_distance, "mean": d.mean, "variance": d.variance,
               "psi": d.psi, "sample_count": d.sample_count, "drawn": d.drawn,
               "excluded_fraction": d.excluded_fraction}
    return ("index", "g", "log_abs_zeta", "normalized"), rows, summary


def _charfn(cfg: RunConfig):
    from .stats import char_fn_samples, dist_log_zeta
    Y = cfg.Y or 1e4
    d = dist_log_zeta(cfg.T, phase_of(cfg.a), cfg.sample_cap, cfg.seed)
    us = 0.25 * np.arange(9)
    samples = char_fn_samples(us, d, Y, primes_up_to(int(Y)))
    rows = [(s.u, s.empirical.real, s.empirical.imag, s.model_j0, s.gaussian) for s in samples]
    summary = {"sample_count": d.sample_count, "psi": d.psi,
               "max_empirical_minus_model": max(abs(s.empirical - s.model_j0) for s in samples)}
    return ("u", "empirical_re", "empirical_im", "model_j0", "gaussian"), rows, summary


def _moments(cfg: RunConfig):
    from .stats import random_model_moment_exact, time_average_moment
    Y = cfg.Y or 100.0
    tab = primes_up_to(max(2, int(Y)))
    rows = []
    for m in range(0, cfg.m + 1):
        rows.append((m, time_average_moment(m, Y, cfg.T, tab), random_model_moment_exact(m, Y, tab)))
    return ("m", "time_average", "random_model"), rows, {}


def _expsum(cfg: RunConfig):
    from .stats import exp_sum_over_grams
    s, bound = exp_sum_over_grams(cfg.x, cfg.T, phase_of(cfg.a), T2=cfg.T2)
    rows = [(cfg.x, s.real, s.imag, abs(s), bound)]
    return ("x", "sum_re", "sum_im", "abs_sum", "bound"), rows, {"ratio": abs(s) / bound}


def _paircorr(cfg: RunConfig):
    from .stats import pair_correlation
    zl = _zero_list(10.0, cfg.T)
    rows = []
    for unfold in (False, True):
        p = pair_correlation(zl, cfg.T, cfg.alpha, cfg.beta, unfold=unfold)
        rows.append((p.alpha, p.beta, int(p.unfolded), p.normalized_count, p.gue_value, p.pairs, p.zeros))
    return ("alpha", "beta", "unfolded", "normalized_count", "gue_value", "pairs", "zeros"), rows, {}


def _hyps(cfg: RunConfig):
    from .stats import hypothesis_s_stat
    zl = _zero_list(cfg.T, 2 * cfg.T)
    rows = []
    for eps in (cfg.epsilon, cfg.epsilon / 2):
        h = hypothesis_s_stat(zl, cfg.T, cfg.n, eps)
        rows.append((h.n, h.epsilon, h.normalized, h.pairs))
    return ("n", "epsilon", "normalized", "pairs"), rows, {"ratio_half_eps": rows[1][2] / rows[0][2]
                                                           if rows[0][2] else None}


def _approx(cfg: RunConfig):
    from .approx import decompose_many, hough_check
    T, X = cfg.T, cfg.X
    zl = _zero_list(T - 3.0, 2 * T + 3.0)
    g = grams_in_range(T, 2 * T, phase_of(cfg.a))
    star = g.t[zl.nearest_distance(g.t) >= star_threshold(g.t)]
    rng = np.random.default_rng(cfg.seed)
    k = min(cfg.sample_cap, star.size)
    ts = np.sort(star[rng.choice(star.size, size=k, replace=False)])
    tab = primes_up_to(int(math.floor(X ** 3 + 1e-9)))
    decs = decompose_many(ts, X, zl, tab, T=T)
    cols = ("t", "prime_sum", "sigma_Xt", "F", "E1", "E2", "E3", "dirichlet_integral",
            "lhs_half", "lhs_sigma", "residual_half", "residual_sigma", "budget",
            "budget_sigma", "hough_margin")
    rows = []
    for d in decs:
        _, _, margin = hough_check(d.t, X, zl)
        rows.append(tuple(getattr(d, c) for c in cols[:-1]) + (margin,))
    res = np.array([abs(r[10]) for r in rows])
    summary = {"points": len(rows), "mean_abs_residual_half": float(res.mean()) if rows else None,
               "min_hough_margin": min(r[-1] for r in rows) if rows else None}
    return cols, rows, summary


_PIPELINES = {"gram": _gram, "zeros": _zeros, "apoints": _apoints, "dist": _dist,
              "approx": _approx, "charfn": _charfn, "moments": _moments, "expsum": _expsum,
              "paircorr": _paircorr, "hyps": _hyps}


def _deviations(cfg: RunConfig) -> dict:
    """X and Y used here versus the height-dependent values of the theory."""
    T = cfg.T
    out = {"X": {"used": cfg.X, "theory": T ** 0.01,
                 "note": "theory value T^(1/100) is below 2 at these heights"}}
    lnlnT = math.log(math.log(T)) if T > math.e else float("nan")
    theory_Y = T ** (1.0 / (0.5 * lnlnT) ** 4) if lnlnT > 0 else float("nan")
    out["Y"] = {"used": cfg.Y or (1e4 if cfg.command == "charfn" else 100.0),
                "theory": theory_Y, "note": "theory value is T^(1/Psi^4)"}
    return out


# ---------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _write(cfg: RunConfig, cols, rows, manifest: RunManifest, path: Path) -> None:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        path.write_text(buf.getvalue(), encoding="utf-8")
        side = path.with_name(path.name + ".manifest.json")
        side.write_text(json.dumps(manifest.as_dict(with_time=True), indent=2, sort_keys=True,
                                   default=_jsonable) + "\n", encoding="utf-8")
    else:
        data = [{c: _jsonable(v) for c, v in zip(cols, r)} for r in rows]
        doc = {"manifest": manifest.as_dict(with_time=False), "data": data}
        path.write_text(json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n",
                        encoding="utf-8")


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    start = time.perf_counter()
    try:
        config.validate()
        if config.sample_cap is None:
            config.sample_cap = _DEFAULT_SAMPLE.get(config.command, 100_000)
        cols, rows, summary = _PIPELINES[config.command](config)
    except DomainError as exc:
        print(f"apoint-lab: invalid input: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, LabError) as exc:
        print(f"apoint-lab: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    path = Path(config.out_path or f"{config.command}.{config.format}")
    summary = {k: _jsonable(v) for k, v in summary.items()}
    manifest = RunManifest(config=asdict(config), version=__version__, rows=len(rows),
                           deviations=_deviations(config), summary=summary,
                           wall_time_s=round(time.perf_counter() - start, 3))
    try:
        _write(config, cols, rows, manifest, path)
    except OSError as exc:
        print(f"apoint-lab: cannot write output: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(rows)} rows to {path} in {manifest.wall_time_s:.1f}s", file=sys.stderr)
    return 0


def export_plotdata(summary, path) -> Path:
    """Plain-text columns comparing empirical curves with their references.

    DistSummary -> v, ecdf(v), Phi(v); list of CharFnSample -> u, Re, Im,
    model_j0, gaussian; list of PairCorrStat -> alpha, beta,
    normalized_count, gue_value.  Numbers carry 12 significant digits.
    """
    from .stats import CharFnSample, DistSummary, PairCorrStat

    if isinstance(summary, DistSummary):
        if summary.values.size == 0:
            raise DomainError("empty distribution")
        v = summary.values
        header = ("v", "ecdf", "normal_cdf")
        cols = [v, np.arange(1, v.size + 1) / v.size, ndtr(v)]
    else:
        items = list(summary)
        if not items:
            raise DomainError("nothing to export")
        if all(isinstance(s, CharFnSample) for s in items):
            header = ("u", "empirical_re", "empirical_im", "model_j0", "gaussian")
            cols = [np.array([s.u for s in items]), np.array([s.empirical.real for s in items]),
                    np.array([s.empirical.imag for s in items]),
                    np.array([s.model_j0 for s in items]), np.array([s.gaussian for s in items])]
        elif all(isinstance(s, PairCorrStat) for s in items):
            header = ("alpha", "beta", "normalized_count", "gue_value")
            cols = [np.array([getattr(s, h) for s in items]) for h in header]
        else:
            raise DomainError("unsupported plot data")
    lines = ["# " + " ".join(header)]
    for row in zip(*cols):
        lines.append(" ".join(f"{float(x):.12g}" for x in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apoint-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--T", type=float, help="height (window is (T, 2T] where relevant)")
    p.add_argument("--T2", type=float, help="explicit upper end of the range")
    p.add_argument("--a-re", type=float, default=2.0)
    p.add_argument("--a-im", type=float, default=0.0)
    p.add_argument("--X", type=float, default=100.0)
    p.add_argument("--Y", type=float)
    p.add_argument("--sample-cap", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_path")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--x", type=float, help="base of the exponential sum")
    p.add_argument("--m", type=int, default=4, help="highest moment")
    p.add_argument("--n", type=int, default=1, help="Hypothesis S integer")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=1.0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    return run(RunConfig(**vars(ns)))


if __name__ == "__main__":
    sys.exit(main())
