"""Height scaling, Neron-Tate scaling, orbit census and point counting runs."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from ..elliptic import (CurveQ, canonical_height, multiplication_height_check, two_isogeny,
                        torsion_order_ec)
from ..hecke import orbit_stats_g1
from .config import Experiment, ExperimentConfig
from .counting import ORACLES, count_rational_points
from .report import emit, provenance

HEIGHT_FIELDS = ["n", "count", "cumulative_count", "max_H", "median_H", "z_residual", "failures", "pass"]
NT_FIELDS = ["curve", "point", "torsion", "h_P", "h_phiP", "ratio", "diff", "h_2P", "diff_2P", "pass"]


def fit_power_law(ns, hs) -> tuple[float, float] | None:
    """Least-squares line log H = log C + kappa log n; None with fewer than two usable points."""
    pts = [(math.log(n), math.log(h)) for n, h in zip(ns, hs) if h]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    if np.ptp(x) == 0:
        return None
    kappa, logC = np.polyfit(x, y, 1)
    return float(logC), float(kappa)


def envelope_constant(rows: list[dict], kappa: float) -> float:
    """Smallest C with max_H(n) <= C n^kappa on the given rows."""
    return max(r["max_H"] / r["n"] ** kappa for r in rows if r["max_H"])


def check_envelope(rows: list[dict], C: float, kappa: float) -> list[dict]:
    return [r for r in rows if r["max_H"] and r["max_H"] > C * r["n"] ** kappa * (1 + 1e-12)]


def _summary(cfg: ExperimentConfig, **kw) -> dict:
    h = cfg.hash
    return {"experiment": cfg.experiment.value, "config": cfg.to_json(), "config_hash": h,
            "provenance": provenance(h), **kw}


def run_height_scaling(cfg: ExperimentConfig) -> dict:
    if cfg.base_point.g != 1:
        raise ValueError("height scaling runs at g = 1")
    tol = cfg.tol("tol_act")
    stats = orbit_stats_g1(cfg.base_point, cfg.n_max, cfg.level, cfg.threads, tol)
    rows = stats.rows()
    for r in rows:
        r["pass"] = r["failures"] == 0 and r["z_residual"] < tol
    fit = fit_power_law([r["n"] for r in rows], [r["max_H"] for r in rows]) if len(rows) >= 2 else None
    summary = _summary(cfg, rows=rows, n_points=stats.n_points, n_fibres=stats.n_fibres,
                       failures=stats.failures, max_z_residual=stats.max_z_residual,
                       log_C=fit[0] if fit else None, kappa_emp=fit[1] if fit else None,
                       interrupted=stats.interrupted, all_pass=all(r["pass"] for r in rows))
    emit(cfg.output_path, summary, rows, HEIGHT_FIELDS)
    return summary


def orbit_census(cfg: ExperimentConfig) -> dict:
    if cfg.base_point.g != 1:
        raise ValueError("orbit census runs at g = 1")
    stats = orbit_stats_g1(cfg.base_point, cfg.n_max, cfg.level, cfg.threads, cfg.tol("tol_act"))
    rows = [{"n": r["n"], "count": r["count"], "cumulative_count": r["cumulative_count"]}
            for r in stats.rows()]
    summary = _summary(cfg, rows=rows, n_fibres=stats.n_fibres, n_points=stats.n_points)
    emit(cfg.output_path, summary, rows, ["n", "count", "cumulative_count"])
    return summary


def bundled_curves() -> list[dict]:
    text = resources.files("heckelab.data").joinpath("curves.json").read_text()
    return json.loads(text)["curves"]


def _nt_row(job) -> dict:
    E, P, tol, bits, label = job
    E2, phi = two_isogeny(E)
    row = {"curve": label, "point": json.dumps(P.to_json(), sort_keys=True)}
    if torsion_order_ec(E, P) is not None:
        row.update(torsion=True, h_P=0.0, h_phiP=0.0, ratio=None, diff=0.0, h_2P=0.0, diff_2P=0.0, **{"pass": True})
        return row
    hP = canonical_height(E, P, tol / 8, bit_budget=bits)
    hphi = canonical_height(E2, phi(P), tol / 4, bit_budget=bits)
    m2 = multiplication_height_check(E, P, 2, tol, bits)
    diff = abs(hphi - 2 * hP)
    row.update(torsion=False, h_P=hP, h_phiP=hphi, ratio=hphi / hP, diff=diff,
               h_2P=m2["lhs"], diff_2P=m2["diff"], **{"pass": diff < tol and m2["pass"]})
    return row


def run_nt_scaling(cfg: ExperimentConfig) -> dict:
    curves = bundled_curves() if cfg.curves is None else cfg.curves
    tol = cfg.tol("tol")
    bits = int(cfg.tol("bit_budget"))
    jobs = []
    for obj in curves:
        E, pts = CurveQ.from_json(obj)
        label = f"y^2 = x^3 + ({E.a}) x^2 + ({E.b}) x" if E.form == "alternate" else f"y^2 = x^3 + ({E.a}) x + ({E.b})"
        jobs += [(E, P, tol, bits, label) for P in pts]
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            rows = list(ex.map(_nt_row, jobs))
    else:
        rows = [_nt_row(j) for j in jobs]
    rate = sum(r["pass"] for r in rows) / len(rows) if rows else 1.0
    summary = _summary(cfg, rows=rows, pass_rate=rate, all_pass=rate == 1.0)
    emit(cfg.output_path, summary, rows, NT_FIELDS)
    return summary


def run_count(cfg: ExperimentConfig) -> dict:
    oracle = ORACLES[cfg.oracle]
    n = count_rational_points(oracle, cfg.T, int(cfg.tol("candidate_budget")))
    rows = [{"oracle": oracle.name, "T": cfg.T, "count": n}]
    summary = _summary(cfg, rows=rows)
    emit(cfg.output_path, summary, rows)
    return summary


RUNNERS = {
    Experiment.height_scaling: run_height_scaling,
    Experiment.orbit_census: orbit_census,
    Experiment.nt_scaling: run_nt_scaling,
    Experiment.count_points: run_count,
}


def run(cfg: ExperimentConfig) -> dict:
    return RUNNERS[cfg.experiment](cfg)
