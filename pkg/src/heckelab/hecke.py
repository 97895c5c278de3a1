"""Generalized Hecke orbits at g = 1: orbit points, complexity, height witnesses, division points."""

from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BoxTooSmall, DegreeSearchExhausted, WitnessVerificationFailed
from .isogmat import (PolarizedIsogenyMatrix, enumerate_isogenies_g1, matrix_expression,
                      min_isogeny_degree_g1)
from .mixeduni import (GroupElement, LevelStructure, MixedPoint, mixed_act, point_residual,
                       reduce_to_F, torsion_order)
from .ratmat import RationalMatrix, height
from .siegel import TOL_ACT, SiegelPoint, act, reduce_g1

log = logging.getLogger(__name__)

KEY_SCALE = 1e8  # reduced tau is keyed on a 1e-8 grid


class Provenance(NamedTuple):
    alpha: PolarizedIsogenyMatrix
    n_prime: int
    w: tuple


@dataclass
class OrbitPoint:
    point: MixedPoint
    provenance: Provenance
    cert: GroupElement
    coset: tuple
    complexity: int = 0

    def to_json(self, witness_height: int | None = None) -> dict:
        return {
            "v": self.point.to_json()["v"],
            "Z": self.point.Z.to_json(),
            "alpha": [[int(x) for x in r] for r in self.provenance.alpha.alpha.tolist()],
            "n_prime": self.provenance.n_prime,
            "w": [str(x) for x in self.provenance.w],
            "complexity": self.complexity,
            "witness_height": witness_height,
        }


@dataclass(frozen=True)
class DecompositionRecord:
    """t = f_t(phi(s0) + p) with s = n0·s0, all at the matrix level."""

    f_t: PolarizedIsogenyMatrix
    phi: PolarizedIsogenyMatrix
    n0: int
    s0_v: tuple
    p_v: tuple
    n_candidates: int = 1

    def __post_init__(self):
        object.__setattr__(self, "s0_v", tuple(Fraction(x) for x in self.s0_v))
        object.__setattr__(self, "p_v", tuple(Fraction(x) for x in self.p_v))


def _vec(v) -> tuple:
    return tuple(Fraction(x) for x in v)


def _identity_iso(g: int) -> PolarizedIsogenyMatrix:
    return PolarizedIsogenyMatrix(RationalMatrix.identity(2 * g), 1, 1)


# -- single points -----------------------------------------------------------------------

def orbit_point(base: MixedPoint, alpha: PolarizedIsogenyMatrix, n_prime: int, w,
                level: LevelStructure | None = None) -> OrbitPoint:
    """Reduce ((m·v)/n' + w, m·Z) into the fundamental set, m the matrix expression of alpha."""
    if n_prime < 1:
        raise ValueError("n_prime must be positive")
    w = _vec(w)
    m = matrix_expression(alpha)
    mv = m.apply(base.v)
    raw = MixedPoint(tuple(x / n_prime + y for x, y in zip(mv, w)), act(m, base.Z))
    red = reduce_to_F(raw, level)
    return OrbitPoint(red.point, Provenance(alpha, n_prime, w), red.cert, red.coset)


def complexity_torsion(t: OrbitPoint, base_tau: SiegelPoint, d_max: int) -> int:
    d = min_isogeny_degree_g1(base_tau, t.point.Z, d_max)
    if d is None:
        raise DegreeSearchExhausted(f"no isogeny of degree <= {d_max} reaches this fibre")
    t.complexity = max(d, torsion_order(t.point.v))
    return t.complexity


def complexity_nontorsion(n_t: int, delta_v) -> int:
    return max(n_t, torsion_order(_vec(delta_v)))


def height_witness(t: OrbitPoint, base: MixedPoint, tol: float = TOL_ACT) -> tuple[GroupElement, int]:
    """Group element sending base to t, assembled from the provenance and the reduction certificate.

    Returns the element together with its height; the action is re-checked.
    """
    alpha, n_prime, w = t.provenance
    m = matrix_expression(alpha)
    gel = t.cert.compose(GroupElement(w, m.scale(Fraction(1, n_prime))))
    r = point_residual(mixed_act(gel, base), t.point)
    if not r < tol:
        raise WitnessVerificationFailed(f"witness residual {r:.3e} exceeds {tol:.1e}")
    return gel, height(gel)


lemma53_witness = height_witness  # name used by the published interface


# -- decompositions ------------------------------------------------------------------------

def decomposition_from_provenance(t: OrbitPoint, base: MixedPoint) -> DecompositionRecord:
    """Canonical record: f_t = alpha, phi = 1, n0 = n', s0 = v/n', p = m^{-1} w."""
    alpha, n_prime, w = t.provenance
    m = matrix_expression(alpha)
    s0 = tuple(x / n_prime for x in base.v)
    return DecompositionRecord(alpha, _identity_iso(base.g), n_prime, s0, m.inverse().apply(w))


def minimal_decomposition(t: OrbitPoint, base: MixedPoint, d_max: int, tol: float = TOL_ACT) -> DecompositionRecord:
    """Decomposition through a minimal-degree isogeny; ties go to the first HNF candidate."""
    if base.g != 1:
        raise ValueError("g = 1 only")
    target = t.point.Z
    for d in range(1, d_max + 1):
        hits = []
        for iso in enumerate_isogenies_g1(d):
            m = matrix_expression(iso)
            image = act(m, base.Z, check=False)
            fd = reduce_g1(image, tol)
            if fd.reduced.distance(target) < tol:
                hits.append((iso, m, fd.gamma))
        if hits:
            iso, m, gamma = hits[0]
            # m(s0 + p) must reduce to t.v modulo Z^2
            pre = gamma.inverse().apply(t.point.v)
            p = tuple(a - b for a, b in zip(m.inverse().apply(pre), base.v))
            return DecompositionRecord(iso, _identity_iso(1), 1, base.v, p, len(hits))
    raise DegreeSearchExhausted(f"no isogeny of degree <= {d_max} reaches this fibre")


def _torus_distance(u, v) -> float:
    out = 0.0
    for a, b in zip(u, v):
        d = a - b
        out = max(out, abs(float(d - round(d))))
    return out


def decomposition_residual(t: OrbitPoint, base: MixedPoint, rec: DecompositionRecord,
                           level: LevelStructure | None = None) -> float:
    """Largest defect among s = n0·s0 (mod Z^2g) and f_t(phi(s0) + p) = t after reduction."""
    s_defect = _torus_distance(base.v, tuple(rec.n0 * x for x in rec.s0_v))
    m_f = matrix_expression(rec.f_t)
    m_phi = matrix_expression(rec.phi)
    x = tuple(a + b for a, b in zip(m_phi.apply(rec.s0_v), rec.p_v))
    raw = MixedPoint(m_f.apply(x), act(m_f @ m_phi, base.Z))
    red = reduce_to_F(raw, level).point
    return max(s_defect, _torus_distance(red.v, t.point.v), red.Z.distance(t.point.Z))


def verify_decomposition(t: OrbitPoint, base: MixedPoint, rec: DecompositionRecord,
                         tol: float = TOL_ACT, level: LevelStructure | None = None) -> bool:
    r = decomposition_residual(t, base, rec, level)
    if r >= tol:
        log.info("decomposition check failed, residual %.3e", r)
    return r < tol


# -- division points ---------------------------------------------------------------------------

def division_points(gens: Sequence, n: int, g: int, box: int = 10_000) -> list[tuple]:
    """Representatives in [0,1)^{2g} of all x with n·x in <gens> + Z^{2g}.

    Coefficients of each generator range over [0, n·ord) where ord is its
    order mod Z^{2g}; a coefficient box smaller than that truncates, with a
    BoxTooSmall warning.
    """
    if n < 1:
        raise ValueError("n must be positive")
    gens = [_vec(v) for v in gens]
    if any(len(v) != 2 * g for v in gens):
        raise ValueError("generators must have length 2g")
    ranges = []
    for v in gens:
        need = n * torsion_order(v)
        if need > box:
            warnings.warn(f"coefficient box {box} truncates a generator of period {need}", BoxTooSmall)
        ranges.append(range(min(need, box)))
    out = set()
    for coeffs in product(*ranges):
        s = [Fraction(0)] * (2 * g)
        for c, v in zip(coeffs, gens):
            s = [a + c * b for a, b in zip(s, v)]
        for z in product(range(n), repeat=2 * g):
            x = tuple((a + k) / n for a, k in zip(s, z))
            out.add(tuple(y - math.floor(y) for y in x))
    return sorted(out)


# -- fibres of the orbit ------------------------------------------------------------------------

@dataclass(frozen=True)
class Fibre:
    """An isogeny class of base fibres, first reached at ``degree`` by ``iso``."""

    index: int
    degree: int
    iso: PolarizedIsogenyMatrix
    m: RationalMatrix
    gamma: RationalMatrix
    tau: SiegelPoint
    residual: float
    n_candidates: int = 1

    @property
    def witness_matrix(self) -> RationalMatrix:
        return self.gamma @ self.m


def _tau_key(tau: SiegelPoint) -> tuple[int, int]:
    t = tau.tau
    return round(t.real * KEY_SCALE), round(t.imag * KEY_SCALE)


def _reduce_image(job):
    base_tau, iso, tol = job
    m = matrix_expression(iso)
    fd = reduce_g1(act(m, base_tau, check=False), tol)
    res = act(fd.gamma @ m, base_tau, check=False).distance(fd.reduced)
    return iso, m, fd.gamma, fd.reduced, res


def discover_fibres(base_tau: SiegelPoint, d_max: int, threads: int = 1, tol: float = TOL_ACT) -> list[Fibre]:
    """Distinct classes m·tau for all HNF isogenies of degree <= d_max, in first-seen order.

    Reductions run as an order-preserving parallel map; the merge is sequential.
    """
    if base_tau.g != 1:
        raise ValueError("g = 1 only")
    jobs = [(base_tau, iso, tol) for d in range(1, d_max + 1) for iso in enumerate_isogenies_g1(d)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(_reduce_image, jobs))
    else:
        results = [_reduce_image(j) for j in jobs]
    fibres: list[Fibre] = []
    seen: dict[tuple[int, int], int] = {}
    for iso, m, gamma, tau, res in results:
        kx, ky = _tau_key(tau)
        hit = None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                j = seen.get((kx + dx, ky + dy))
                if j is not None and fibres[j].tau.distance(tau) < 1 / KEY_SCALE:
                    hit = j
        if hit is None:
            seen[(kx, ky)] = len(fibres)
            fibres.append(Fibre(len(fibres), iso.degree, iso, m, gamma, tau, res))
        elif fibres[hit].degree == iso.degree:
            f = fibres[hit]
            fibres[hit] = Fibre(f.index, f.degree, f.iso, f.m, f.gamma, f.tau, f.residual, f.n_candidates + 1)
    return fibres


def torsion_grid(n_max: int) -> list[tuple[int, int, int]]:
    """(N, a, b) with (a/N, b/N) of exact order N, sorted by N then lexicographically."""
    out = []
    for N in range(1, n_max + 1):
        for a in range(N):
            for b in range(N):
                if gcd(gcd(a, b), N) == 1:
                    out.append((N, a, b))
    return out


def _shift_for(u, m: RationalMatrix, gamma: RationalMatrix, base_v, n_prime: int = 1) -> tuple:
    """Torsion shift w placing the reduced orbit point at u on the target fibre."""
    target = gamma.inverse().apply(u)
    mv = m.apply(base_v)
    return tuple(a - b / n_prime for a, b in zip(target, mv))


def enumerate_orbit_g1(base: MixedPoint, n_max: int, level: LevelStructure | None = None,
                       threads: int = 1, tol: float = TOL_ACT) -> list[OrbitPoint]:
    """All orbit points of complexity <= n_max, one per (fibre, torsion point) pair.

    Order: fibres by first-seen (degree, HNF), then torsion points by (order, a, b).
    Complexity is max(first-seen degree, torsion order).
    """
    if base.g != 1:
        raise ValueError("g = 1 only")
    if not base.rational:
        raise ValueError("base point needs a rational V-part")
    fibres = discover_fibres(base.Z, n_max, threads, tol)
    grid = torsion_grid(n_max)
    out = []
    keys = set()
    for f in fibres:
        for N, a, b in grid:
            u = (Fraction(a, N), Fraction(b, N))
            w = _shift_for(u, f.m, f.gamma, base.v)
            t = orbit_point(base, f.iso, 1, w, level)
            key = (_tau_key(t.point.Z), tuple(x - math.floor(x) for x in t.point.v))
            if key in keys:
                continue
            keys.add(key)
            t.complexity = max(f.degree, N)
            out.append(t)
    return out


# -- vectorized orbit statistics ---------------------------------------------------------------------

@dataclass
class OrbitStats:
    """Per-complexity counts and witness-height histogram of an orbit enumeration."""

    n_max: int
    hist: np.ndarray          # hist[n, H] = number of points of complexity n with witness height H
    n_points: int = 0
    n_fibres: int = 0
    max_v_residual: int = 0   # exact V-part mismatches (integer numerators); 0 when all verify
    max_z_residual: float = 0.0
    failures: int = 0
    z_residual_by_n: np.ndarray | None = None
    failures_by_n: np.ndarray | None = None
    interrupted: bool = False

    def __post_init__(self):
        if self.z_residual_by_n is None:
            self.z_residual_by_n = np.zeros(self.n_max + 1)
        if self.failures_by_n is None:
            self.failures_by_n = np.zeros(self.n_max + 1, dtype=np.int64)

    def counts(self) -> np.ndarray:
        return self.hist.sum(axis=1)

    def rows(self) -> list[dict]:
        """One row per complexity n: count (exactly n), cumulative, max_H (<= n), median_H (exactly n)."""
        rows = []
        cum = 0
        running_max = 0
        for n in range(1, self.n_max + 1):
            h = self.hist[n]
            c = int(h.sum())
            cum += c
            nz = np.nonzero(h)[0]
            if len(nz):
                running_max = max(running_max, int(nz[-1]))
            rows.append({"n": n, "count": c, "cumulative_count": cum,
                         "max_H": running_max if cum else None,
                         "median_H": _hist_median(h) if c else None,
                         "z_residual": float(self.z_residual_by_n[n]),
                         "failures": int(self.failures_by_n[n])})
        return rows


def _hist_median(h: np.ndarray) -> float:
    c = int(h.sum())
    cs = np.cumsum(h)
    lo = int(np.searchsorted(cs, (c - 1) // 2 + 1))
    hi = int(np.searchsorted(cs, c // 2 + 1))
    return (lo + hi) / 2


def _grid_arrays(n_max: int):
    grid = np.array(torsion_grid(n_max), dtype=np.int64)
    return grid[:, 0], grid[:, 1], grid[:, 2]


def _int_matrix(M: RationalMatrix) -> np.ndarray:
    return np.array(M.to_int_rows(), dtype=np.int64)


def _reduced_height(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    g = np.gcd(num, den)
    g[g == 0] = 1
    return np.maximum(np.abs(num) // g, den // g)


def orbit_stats_g1(base: MixedPoint, n_max: int, level: LevelStructure | None = None,
                   threads: int = 1, tol: float = TOL_ACT, fibres: list[Fibre] | None = None) -> OrbitStats:
    """Same points and witnesses as enumerate_orbit_g1, evaluated in integer numpy arithmetic.

    For each fibre the torsion grid is processed as one block: shift, raw point,
    reduction, witness (c + γw, γm), its action on the base V-part and its height.
    Every witness is checked exactly on the V-part; the Z-part residual is per fibre.
    """
    level = level or LevelStructure()
    N_lvl = level.N
    if not base.rational:
        raise ValueError("base point needs a rational V-part")
    fibres = fibres if fibres is not None else discover_fibres(base.Z, n_max, threads, tol)
    order, ga, gb = _grid_arrays(n_max)
    Q = 1
    for x in base.v:
        Q = lcm(Q, x.denominator)
    vb = np.array([int(x * Q) for x in base.v], dtype=np.int64)
    D = order * Q // np.gcd(order, Q)        # common denominator per grid point
    u = np.stack([ga * (D // order), gb * (D // order)])     # u·D
    stats = OrbitStats(n_max, np.zeros((n_max + 1, 8), dtype=np.int64))
    try:
        for f in fibres:
            _fibre_block(stats, f, order, u, vb, D, Q, N_lvl, tol)
    except KeyboardInterrupt:
        stats.interrupted = True
    stats.n_fibres = len(fibres)
    return stats


def _fibre_block(stats: OrbitStats, f: Fibre, order, u, vb, D, Q, N_lvl, tol):
    cplx = np.maximum(order, f.degree)
    z_bad = f.residual >= tol
    stats.max_z_residual = max(stats.max_z_residual, f.residual)
    stats.z_residual_by_n[f.degree:] = np.maximum(stats.z_residual_by_n[f.degree:], f.residual)
    m, gam = _int_matrix(f.m), _int_matrix(f.gamma)
    gam_inv = _int_matrix(f.gamma.inverse())
    mvb = (m @ vb)[:, None] * (D // Q)                   # m·v_b scaled to D
    w = gam_inv @ u - mvb                                  # shift w, scaled to D
    raw = mvb + w
    gv = gam @ raw
    shift = -N_lvl * np.floor_divide(gv, N_lvl * D)      # integral shift into [0, N)
    reduced = gv + shift * D
    wit_M = gam @ m
    wit_w = shift * D + gam @ w
    acted = wit_w + (wit_M @ vb)[:, None] * (D // Q)
    bad = np.any(acted != reduced, axis=0) | z_bad
    stats.failures += int(bad.sum())
    np.add.at(stats.failures_by_n, cplx[bad], 1)
    stats.max_v_residual = max(stats.max_v_residual, int(np.abs(acted - reduced).max(initial=0)))
    hw = np.maximum(_reduced_height(wit_w[0], D), _reduced_height(wit_w[1], D))
    hm = max(max(abs(int(x)) for x in wit_M.ravel()), 1)
    H = np.maximum(hw, hm)
    if H.max() >= stats.hist.shape[1]:
        grown = np.zeros((stats.n_max + 1, 2 * int(H.max()) + 1), dtype=np.int64)
        grown[:, :stats.hist.shape[1]] = stats.hist
        stats.hist = grown
    np.add.at(stats.hist, (cplx, H), 1)
    stats.n_points += len(order)


def witness_rows(points: list[OrbitPoint], base: MixedPoint, n_max: int, tol: float = TOL_ACT) -> list[dict]:
    """Rows of the same shape as OrbitStats.rows, computed point by point through height_witness."""
    by_n: dict[int, list[int]] = {}
    for t in points:
        _, H = height_witness(t, base, tol)
        by_n.setdefault(t.complexity, []).append(H)
    rows, cum, running = [], 0, 0
    for n in range(1, n_max + 1):
        hs = by_n.get(n, [])
        cum += len(hs)
        if hs:
            running = max(running, max(hs))
        rows.append({"n": n, "count": len(hs), "cumulative_count": cum,
                     "max_H": running if cum else None,
                     "median_H": float(np.median(hs)) if hs else None})
    return rows


def dump_orbit_jsonl(points: list[OrbitPoint], base: MixedPoint, fh) -> int:
    """Write one JSON object per orbit point; returns the number of lines."""
    for t in points:
        _, H = height_witness(t, base)
        fh.write(json.dumps(t.to_json(H), sort_keys=True) + "\n")
    return len(points)
