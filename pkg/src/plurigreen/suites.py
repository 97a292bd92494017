"""Reproducible verification suites.

Each suite returns a summary dict holding only numbers derived from the
computation (no timings), so two runs with the same RunConfig produce
identical summaries.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable

import numpy as np

from .bounds import chain_bounds, closed_form_green, green_interval, lelong_jensen_residual, psh_lower_bound, pushforward_upper_bound
from .compactify import (
    boundary_trace,
    clusters,
    distance_matrix,
    invariance_test,
    norming_form,
    phi_V,
    radial_sequence,
)
from .config import RunConfig
from .fields import ScalarField
from .geometry import Ball, MobiusMap, Polydisk, SublevelDcg, unit_bidisk, unit_disk
from .hyperconvex import classify_pole, continuity_scan, ratio_test
from .metrics import HermitianMetric, azukawa, bergman_constants, royden, sigma_estimates, suita_check

SLACK = -1e-9


def _check(name: str, value, threshold, passed: bool) -> dict:
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}


def _summary(suite: str, checks: list[dict], **extra) -> dict:
    return {"suite": suite, "passed": all(c["passed"] for c in checks), "checks": checks, **extra}


def _rng(cfg: RunConfig, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, tag]))


def suite_chain(cfg: RunConfig, pairs: int = 100) -> dict:
    """caratheodory lo <= green lo <= green hi <= kobayashi hi on the bidisk."""
    D = unit_bidisk()
    rng = _rng(cfg, 101)
    Z, W = D.sample(rng, pairs), D.sample(rng, pairs)
    worst = math.inf
    for z, w in zip(Z, W):
        b = chain_bounds(D, z, w, cfg)
        c, g, k = b["caratheodory"], b["green"], b["kobayashi"]
        worst = min(worst, g.lo - c.lo, g.hi - g.lo, k.hi - g.hi)
    return _summary("chain", [_check("min chain slack", worst, SLACK, worst >= SLACK)], pairs=pairs)


def suite_monotone(cfg: RunConfig, pairs: int = 200) -> dict:
    """Green functions decrease as the domain grows: Ball(0, 1/2) inside Ball(0, 1)."""
    small, big = Ball((0j, 0j), 0.5), Ball((0j, 0j), 1.0)
    rng = _rng(cfg, 102)
    Z, W = small.sample(rng, pairs), small.sample(rng, pairs)
    exact_worst, iv_worst = math.inf, math.inf
    for z, w in zip(Z, W):
        exact_worst = min(exact_worst, closed_form_green(small, z, w) - closed_form_green(big, z, w))
        a = green_interval(small, z, w, cfg, disks=False)
        b = green_interval(big, z, w, cfg, disks=False)
        iv_worst = min(iv_worst, a.hi - b.lo + a.width + b.width)
    return _summary(
        "monotone",
        [
            _check("closed form g_small - g_big", exact_worst, 0.0, exact_worst >= 0),
            _check("interval slack", iv_worst, SLACK, iv_worst >= SLACK),
        ],
        pairs=pairs,
    )


def suite_pole(cfg: RunConfig) -> dict:
    checks = []
    fits = {}
    for name, D in (("ball", Ball((0j, 0j), 1.0)), ("bidisk", unit_bidisk()), ("sublevel-dcg", SublevelDcg.default())):
        fit = classify_pole(D, (0, 0), cfg)
        fits[name] = {"classification": fit.classification, "c1": fit.c1, "c2": fit.c2}
        checks.append(_check(f"{name} classification", fit.classification, "Strict", fit.classification == "Strict"))
    c = max(abs(fits["ball"]["c1"]), abs(fits["ball"]["c2"]))
    checks.append(_check("ball max(|c1|, |c2|)", c, 0.02, c <= 0.02))
    return _summary("pole", checks, fits=fits)


def suite_ratio(cfg: RunConfig) -> dict:
    B = Ball((0j, 0j), 1.0)
    cfg = replace(cfg, eps=0.1)
    near = ratio_test(B, (0, 0), 0.3, cfg)
    far = ratio_test(B, (0, 0), 0.5, cfg, deltas=[d for d, _ in near.table])
    mono = all(f[1] <= n[1] + 1e-12 for n, f in zip(near.table, far.table))
    devs = [d for _, d in near.table]
    decreasing = all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
    return _summary(
        "ratio",
        [
            _check("delta found", near.delta, 0.01, near.delta >= 0.01),
            _check("deviation at delta", near.deviation, 0.1, near.deviation <= 0.1),
            _check("deviation monotone in excluded radius", mono, True, mono),
            _check("deviation decreasing as delta shrinks", decreasing, True, decreasing),
        ],
        table=[list(t) for t in near.table],
    )


def suite_azukawa(cfg: RunConfig, directions: int = 16, royden_samples: int = 16) -> dict:
    """A(0, v) = log||v|| on the ball, and R_hi >= A_hi - 0.02 on the ball and bidisk."""
    B = Ball((0j, 0j), 1.0)
    rng = _rng(cfg, 105)
    worst_width, miss = 0.0, 0.0
    for _ in range(directions):
        v = (rng.normal(size=2) + 1j * rng.normal(size=2)) * rng.uniform(0.2, 3.0)
        a = azukawa(B, (0, 0), v, cfg)
        target = math.log(np.linalg.norm(v))
        worst_width = max(worst_width, a.hi - a.lo)
        miss = max(miss, a.lo - target, target - a.hi)
    rcfg = replace(cfg, budget=replace(cfg.budget, restarts=min(cfg.budget.restarts, 6), simplex_evals=300))
    worst_gap = math.inf
    for D in (B, unit_bidisk()):
        for _ in range(royden_samples):
            w = 0.7 * D.sample(rng, 1)[0]
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            r = royden(D, w, v, rcfg)
            a = azukawa(D, w, v, cfg)
            worst_gap = min(worst_gap, r.hi - a.hi)
    return _summary(
        "azukawa",
        [
            _check("ball max width", worst_width, 0.1, worst_width <= 0.1),
            _check("ball max distance of log||v|| outside", miss, 1e-9, miss <= 1e-9),
            _check("min R_hi - A_hi", worst_gap, -0.02, worst_gap >= -0.02),
        ],
    )


def suite_sigma(cfg: RunConfig) -> dict:
    m = 2
    ball, poly = bergman_constants("ball", m), bergman_constants("polydisk", m)
    checks = [
        _check("ball closed form", ball.sigma_s, -math.log(math.sqrt(m + 1)), ball.sigma_s == ball.sigma_i == -math.log(math.sqrt(m + 1))),
        _check("polydisk closed form sigma_s", poly.sigma_s, -math.log(math.sqrt(2)), poly.sigma_s == -math.log(math.sqrt(2))),
        _check("polydisk closed form sigma_i", poly.sigma_i_stated, -math.log(m), poly.sigma_i_stated == -math.log(m)),
    ]
    eb = sigma_estimates(Ball((0j, 0j), 1.0), (0, 0), HermitianMetric("bergman_ball", m), cfg)
    ep = sigma_estimates(unit_bidisk(), (0, 0), HermitianMetric("bergman_polydisk", m), cfg)
    for label, est, ref in (
        ("ball sigma_i", eb.sigma_i, ball.sigma_i),
        ("ball sigma_s", eb.sigma_s, ball.sigma_s),
        ("polydisk sigma_i", ep.sigma_i, poly.sigma_i),
        ("polydisk sigma_s", ep.sigma_s, poly.sigma_s),
    ):
        err = max(abs(est[0] - ref), abs(est[1] - ref))
        checks.append(_check(f"{label} estimate error", err, 0.1, err <= 0.1))
    return _summary("sigma", checks)


def suite_suita(cfg: RunConfig) -> dict:
    checks = []
    for w in (0.0, 0.3, 0.6):
        r = suita_check((w,), cfg=cfg)
        checks.append(_check(f"lhs - rhs at w={w}", r.gap, 0.05, r.holds and abs(r.gap) <= 0.05))
    return _summary("suita", checks)


def _test_fields() -> list[ScalarField]:
    return [
        ScalarField("re z", lambda P: np.real(P[:, 0]), levi=lambda P: np.zeros((len(P), 1, 1), dtype=complex)),
        ScalarField("|z|^2", lambda P: np.abs(P[:, 0]) ** 2, levi=lambda P: np.ones((len(P), 1, 1), dtype=complex)),
        ScalarField(
            "|z|^4",
            lambda P: np.abs(P[:, 0]) ** 4,
            levi=lambda P: (4 * np.abs(P[:, 0]) ** 2).reshape(-1, 1, 1).astype(complex),
        ),
    ]


def suite_jensen(cfg: RunConfig) -> dict:
    D = unit_disk()
    checks = []
    for u in _test_fields():
        for w in (0.0, 0.5):
            res = lelong_jensen_residual(D, u, (w,))
            checks.append(_check(f"residual {u.name} at w={w}", res, 1e-3, res <= 1e-3))
    return _summary("jensen", checks)


def suite_discontinuity(cfg: RunConfig) -> dict:
    S = SublevelDcg.default()
    half = (0.5, 0.0)
    lo = psh_lower_bound(S, half, (0, 0), seed=cfg.seed).lo
    target_lo = -1.5 * math.log(2)
    cJ = S.carr[-1]
    zJ = (0.5, cJ / 2)
    sl = [s for s in S.slices() if abs(s.direction[1] / s.direction[0] - cJ) < 1e-12][0]
    hi = pushforward_upper_bound(sl, zJ, (0, 0)).hi
    path = [((0.5, c / 2), (0, 0)) for c in S.carr]
    scan = continuity_scan(S, path, (half, (0, 0)), cfg)
    return _summary(
        "discontinuity",
        [
            # u(1/2, 0) equals -1.5 log 2 analytically; the tolerance only absorbs rounding
            _check("lower bound at (1/2, 0)", lo, target_lo, lo >= target_lo - 1e-12),
            _check("slice bound at z_J", hi, -2 * math.log(2) + 0.1, hi <= -2 * math.log(2) + 0.1),
            _check("continuity scan", scan.verdict, "DISCONTINUITY WITNESS", scan.verdict == "DISCONTINUITY WITNESS"),
        ],
        gap=scan.gap,
        widths=scan.widths,
    )


def suite_compactify(cfg: RunConfig, depth: int = 10) -> dict:
    D = unit_disk()
    V = norming_form(D, 128, record=False)
    angles = (0.0, math.pi / 2, math.pi)
    checks = []
    tails = []
    for th in angles:
        seq = radial_sequence(th, depth)
        rep = boundary_trace(D, seq, V, th)
        checks.append(_check(f"successive distance at depth {depth}, angle {th:.4f}", rep.successive[-1], 0.05, rep.successive[-1] <= 0.05))
        checks.append(_check(f"tail vs Poisson profile, angle {th:.4f}", rep.tail_to_profile, 0.05, rep.tail_to_profile <= 0.05))
        tails.append(phi_V(D, seq[-1], V))
    Dm = distance_matrix(tails)
    sep = float(min(Dm[i, j] for i in range(3) for j in range(i + 1, 3)))
    checks.append(_check("min pairwise separation of limits", sep, 0.5, sep >= 0.5))
    pts = [p for th in angles for p in radial_sequence(th, depth, start=5)]
    labels = clusters(distance_matrix([phi_V(D, p, V) for p in pts]), 0.5)
    checks.append(_check("clusters at eps 0.5", len(set(labels)), 3, len(set(labels)) == 3))
    inv = invariance_test(D, MobiusMap(D, 0, -0.5), pts, V)
    checks.append(_check("partition edit distance", inv.max_edit, 0, inv.max_edit == 0))
    return _summary("compactify", checks)


SUITES: dict[str, Callable[[RunConfig], dict]] = {
    "chain": suite_chain,
    "monotone": suite_monotone,
    "pole": suite_pole,
    "ratio": suite_ratio,
    "azukawa": suite_azukawa,
    "sigma": suite_sigma,
    "suita": suite_suita,
    "jensen": suite_jensen,
    "discontinuity": suite_discontinuity,
    "compactify": suite_compactify,
}


def run_suite(name: str, cfg: RunConfig) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg)
