"""Experiment registry, acceptance battery and result emission shared by the CLI.

Every experiment takes a validated parameter model, the multiplier (if it
uses one) and a seed, and returns an :class:`Outcome`: rows for the CSV, a
metrics dict for the JSON summary, and whether every asserted check held.
Rows with ``passed is None`` are reported, not asserted.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import cz, heisenberg as hb, kernel_rn as kr
from .grid import SampledFunction, UniformGrid
from .multiplier import (
    DEFAULT_WINDOW,
    DyadicPiece,
    MultiplierSpec,
    Oscillating,
    check_condition_pos,
    class_membership,
    expected_slopes,
    lp_sharp_range,
    piece_grid,
)


def threads() -> int:
    env = os.environ.get("OSCMULT_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def parallel_map(fn: Callable, items) -> list:
    """Order-preserving map over a thread pool capped by OSCMULT_THREADS."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


@dataclass
class Row:
    keys: dict
    value: Any
    tolerance: Optional[float] = None
    passed: Optional[bool] = None


@dataclass
class Outcome:
    rows: list[Row]
    metrics: dict
    artifacts: dict[str, bytes] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.rows)


def rows_to_csv(experiment: str, rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "keys", "value", "tolerance", "pass"])
    for r in rows:
        keys = ";".join(f"{k}={fmt(v)}" for k, v in r.keys.items())
        w.writerow([experiment, keys, fmt(r.value), fmt(r.tolerance), fmt(r.passed)])
    return buf.getvalue()


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if np.isfinite(f) else str(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def dumps(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


# -- parameter models ------------------------------------------------------------------


class Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ClassCheckParams(Params):
    s: float = 1.0
    n: int = 1
    j_min: Optional[int] = None
    j_max: Optional[int] = None
    s_grid: Optional[list[float]] = None
    points: int = 1 << 14


class KernelParams(Params):
    n: int = Field(1, ge=1, le=3)
    lam_min: float = 1.0
    lam_max: float = 2.0**10
    j: Optional[int] = None


class FSParams(Params):
    lam_min: float = 1.0
    lam_max: float = 2.0**10
    y: list[float] = Field(default_factory=lambda: [2.0**-k for k in range(1, 9)])


class KeyEstimateParams(Params):
    s: float = 0.75
    trials: int = 100
    R: float = 8.0
    N: int = 1 << 10


class LpScanParams(Params):
    p: list[float] = Field(default_factory=lambda: [1 / 0.9, 1 / 0.85, 1 / 0.75, 1 / 0.7, 2.0, 1 / 0.3, 1 / 0.25, 1 / 0.15, 1 / 0.1])
    ladder: list[float] = Field(default_factory=lambda: [2.0**4, 2.0**6, 2.0**8, 2.0**10])
    n: int = 1


class PlancherelParams(Params):
    family: str = "default"
    j_min: int = -2
    j_max: int = 2


class HeatParams(Params):
    region: float = 4.0
    k_max: int = 256


class WeightedParams(Params):
    s: float = 2.1
    j_min: int = 0
    j_max: int = 4
    with_derivative: bool = False


class MeanValueParams(Params):
    N: float = 4.0
    samples: int = 20000


class KeyLieParams(Params):
    s_grid: list[float] = Field(default_factory=lambda: [1.0, 1.5, 2.0, 2.5])
    j_min: int = 0
    j_max: int = 3


class CZParams(Params):
    cases: int = 1000


class WeakParams(Params):
    ladder: list[float] = Field(default_factory=lambda: [2.0**4, 2.0**6, 2.0**8, 2.0**10])
    inputs: str = "spike"


class AtomParams(Params):
    L_min: int = -6
    L_max: int = 6
    truncation: float = 2.0**9
    kind: str = "haar"


class TailParams(Params):
    s: float = 0.75
    L_min: int = -8
    L_max: int = 4
    j_max: int = 20


class LambdaParams(Params):
    j: int = 4
    L: float = -3
    theta: float = 0.5
    regime: str = "N1"
    s: float = 2.5
    Q: float = 4.0


class SuiteParams(Params):
    criteria: Optional[list[int]] = None


# -- experiments -----------------------------------------------------------------------


def _spec_or(spec: Optional[MultiplierSpec], default: MultiplierSpec) -> MultiplierSpec:
    return default if spec is None else spec


def exp_class_check(p: ClassCheckParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    js = None if p.j_min is None or p.j_max is None else range(p.j_min, p.j_max + 1)
    rep = class_membership(spec, s=p.s, s_grid=p.s_grid, j_range=js, grid=piece_grid(p.points))
    rows = [Row({"j": r["j"], "s_prime": r["s_prime"], "region": r["region"], "quantity": q}, r[q])
            for r in rep.rows for q in ("linf", "sobolev", "normalized_linf", "normalized_sobolev")]
    rows.append(Row({"quantity": "verdict"}, rep.verdict))
    metrics = json.loads(rep.to_json())
    return Outcome(rows, metrics, {"class_report.csv": rep.to_csv().encode()})


def exp_kernel(p: KernelParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    if p.j is not None:
        K = kr.piece_kernel(spec, p.j, p.n)
    else:
        K = kr.kernel_of_radial_multiplier(spec, p.n, (p.lam_min, p.lam_max))
    sym_l2 = K.symbol.l2()
    err = abs(K.l2 - sym_l2) / max(sym_l2, 1e-300)
    t = tol.get("plancherel", 1e-8)
    rows = [Row({"quantity": "l1"}, K.l1), Row({"quantity": "l2"}, K.l2),
            Row({"quantity": "plancherel_rel_error"}, err, t, err <= t),
            Row({"quantity": "boundary_fraction"}, K.boundary_fraction())]
    return Outcome(rows, {"l1": K.l1, "l2": K.l2, "plancherel_rel_error": err, "grid": {"R": K.grid.R, "N": K.grid.N}},
                   {"kernel.bin": K.samples.to_bytes()})


def exp_fs(p: FSParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    K = kr.kernel_of_radial_multiplier(spec, 1, (p.lam_min, p.lam_max))
    res = kr.fefferman_stein_condition(K, spec.theta, p.y)
    rows = [Row({"y": y}, v, 2 * K.l1, v <= 2 * K.l1) for y, v in zip(res.ys, res.profile)]
    rows.append(Row({"quantity": "sup"}, res.sup))
    return Outcome(rows, {"sup": res.sup, "l1": K.l1, "profile": res.profile})


def exp_key_estimate(p: KeyEstimateParams, spec, seed, tol) -> Outcome:
    rng = np.random.default_rng(seed)
    g = UniformGrid(1, p.R, p.N)
    rows, worst = [], 0.0
    for i in range(p.trials):
        k = kr.key_estimate_ratio(kr.random_smooth_symbol(rng, g), p.s)
        worst = max(worst, k.ratio / k.constant)
        rows.append(Row({"trial": i}, k.ratio, k.constant, k.holds))
    return Outcome(rows, {"max_ratio_over_constant": worst, "violations": sum(not r.passed for r in rows)})


def exp_lp_scan(p: LpScanParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 0.5))
    res = kr.lp_scan(spec, p.p, p.ladder, p.n, seed=seed)
    edge = lp_sharp_range(spec.beta, p.n)
    rows = []
    for r in res:
        dist = abs(1 / r.p - 0.5)
        expect = "stable" if dist <= edge + 1e-12 else ("growing" if dist >= edge + 0.1 else None)
        for R, b, name in zip(r.ladder, r.bounds, r.best_input):
            rows.append(Row({"p": r.p, "R": R, "input": name}, b))
        rows.append(Row({"p": r.p, "quantity": "exponent"}, r.exponent, kr.GROWTH_EXPONENT,
                        None if expect is None else r.verdict == expect))
    return Outcome(rows, {"sharp_edge": edge, "exponents": {fmt(r.p): r.exponent for r in res},
                          "verdicts": {fmt(r.p): r.verdict for r in res}})


def exp_plancherel(p: PlancherelParams, spec, seed, tol) -> Outcome:
    if p.family != "default":
        raise ValueError("only the default family is available from the command line")
    rep = hb.plancherel_check(j_range=range(p.j_min, p.j_max + 1))
    td, ts = tol.get("ratio", 0.02), tol.get("slope", 0.05)
    rows = [Row({"h": n}, r) for n, r in zip(rep.names, rep.ratios)]
    rows.append(Row({"quantity": "max_deviation"}, rep.max_deviation, td, rep.max_deviation < td))
    rows += [Row({"j": j, "quantity": "piece_energy"}, e) for j, e in zip(rep.js, rep.piece_energy)]
    rows.append(Row({"quantity": "piece_slope"}, rep.piece_slope, ts, abs(rep.piece_slope - hb.Q) <= ts))
    return Outcome(rows, {"constant": rep.constant, "max_deviation": rep.max_deviation, "piece_slope": rep.piece_slope})


def exp_heat(p: HeatParams, spec, seed, tol) -> Outcome:
    K = hb.sublaplacian_kernel(hb.heat_multiplier, k_max=p.k_max, label="heat")
    res = hb.heat_oracle_check(K, p.region)
    te, tm = tol.get("oracle", 1e-6), tol.get("mass", 1e-3)
    rows = [Row({"quantity": "max_rel_error", "points": res.points}, res.max_rel_error, te, res.max_rel_error <= te),
            Row({"quantity": "mass"}, res.mass, tm, abs(res.mass - 1.0) <= tm)]
    return Outcome(rows, {"max_rel_error": res.max_rel_error, "mass": res.mass, "sidecar": K.sidecar()},
                   {"heat_kernel.bin": K.samples.to_bytes(), "heat_kernel.json": dumps(K.sidecar()).encode()})


def exp_weighted(p: WeightedParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 4.0))
    rows, ratios = [], []
    for j in range(p.j_min, p.j_max + 1):
        h = hb.piece_multiplier(spec, j)
        K = hb.sublaplacian_kernel(h, label=f"piece_{j}")
        w = hb.weighted_l2_group(K, p.s, p.with_derivative)
        sob = hb.multiplier_sobolev(h, p.s)
        ratios.append(w / sob)
        rows.append(Row({"j": j, "quantity": "weighted_over_sobolev"}, w / sob))
        if not p.with_derivative:
            rows.append(Row({"j": j, "quantity": "weighted_ge_l2"}, w, K.l2, w >= K.l2))
    return Outcome(rows, {"sup_ratio": max(ratios), "ratios": ratios})


def exp_mean_value(p: MeanValueParams, spec, seed, tol) -> Outcome:
    a = hb.mean_value_check(N=p.N, samples=p.samples, seed=seed)
    b = hb.mean_value_check(N=p.N, samples=2 * p.samples, seed=seed + 1)
    t = tol.get("refinement", 0.10)
    rel = abs(b - a) / max(a, b)
    rows = [Row({"samples": p.samples}, a), Row({"samples": 2 * p.samples}, b),
            Row({"quantity": "refinement_change"}, rel, t, rel <= t)]
    return Outcome(rows, {"C_N": b, "refinement_change": rel})


def exp_key_lie(p: KeyLieParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, float(hb.Q)))
    rep = hb.key_lie_probe(spec, p.s_grid, range(p.j_min, p.j_max + 1))
    rows = [Row({"s": s, "quantity": "sup_ratio"}, rep.sup_ratio[s]) for s in rep.s_grid]
    rows += [Row({"s": s, "quantity": "growth"}, rep.growth[s]) for s in rep.s_grid]
    return Outcome(rows, {"sup_ratio": rep.sup_ratio, "growth": rep.growth, "critical_s": rep.critical_s},
                   {"key_lie_profile.csv": rep.to_csv().encode()})


def random_cz_input(rng: np.random.Generator, d: int):
    """A random signal with heavy tails or sparse spikes, and an admissible height."""
    N = 256 if d == 1 else 32
    g = UniformGrid(d, 4.0, N)
    kind = rng.integers(3)
    if kind == 0:
        v = rng.standard_cauchy(g.shape)
    elif kind == 1:
        v = np.zeros(g.shape)
        idx = tuple(rng.integers(0, N, size=(d, rng.integers(1, 12))))
        v[idx] = rng.exponential(50.0, size=len(idx[0])) * rng.choice([-1, 1], size=len(idx[0]))
    else:
        v = rng.normal(size=g.shape) ** 3
    f = SampledFunction(g, v)
    floor = np.sum(np.abs(v)) * g.cell_volume / (2.0 * g.R[0]) ** d * 2**d
    alpha = float(floor * (1.0 + rng.exponential(2.0)) + 1e-9)
    return f, alpha


def cz_suite(cases: int, seed: int) -> tuple[int, dict[str, int]]:
    rng = np.random.default_rng(seed)
    fails = {k: 0 for k in ("reconstruction", "good_bound", "mean_zero", "bad_l1", "measure")}
    for i in range(cases):
        f, alpha = random_cz_input(rng, 1 if i % 2 == 0 else 2)
        for k, ok in cz.cz_decompose(f, alpha).invariants().items():
            fails[k] += not ok
    return cases, fails


def exp_cz(p: CZParams, spec, seed, tol) -> Outcome:
    n, fails = cz_suite(p.cases, seed)
    rows = [Row({"invariant": k, "cases": n}, v, 0, v == 0) for k, v in fails.items()]
    return Outcome(rows, {"cases": n, "violations": fails})


def exp_weak(p: WeakParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    grid = UniformGrid(1, 32.0, 1 << 17)
    family = {"spike": cz.spike(grid)} if p.inputs == "spike" else None
    res = cz.weak_type_probe(spec, family, p.ladder, grid, seed=seed)
    t = tol.get("spread", 1.3)
    rows = [Row({"R": R, "input": n}, c) for R, c, n in zip(res.ladder, res.constants, res.best_input)]
    bounded = spec.beta >= 0
    rows.append(Row({"quantity": "spread"}, res.spread, t, res.spread < t if bounded else None))
    if not bounded:
        rows.append(Row({"quantity": "monotone_growth"}, res.monotone_growth, None, res.monotone_growth))
    return Outcome(rows, {"constants": res.constants, "spread": res.spread, "monotone_growth": res.monotone_growth})


def exp_atom(p: AtomParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    res = cz.atom_test(spec, range(p.L_min, p.L_max + 1), truncation=p.truncation, kind=p.kind, ablation_L=p.L_min)
    ts, ta = tol.get("spread", 1.5), tol.get("ablation", 3.0)
    rows = []
    for L, full, far, near, b in zip(res.Ls, res.full, res.far, res.near, res.near_bound):
        rows.append(Row({"L": L, "quantity": "full"}, full))
        rows.append(Row({"L": L, "quantity": "far"}, far))
        rows.append(Row({"L": L, "quantity": "near_vs_bound"}, near, b, near <= b))
    rows.append(Row({"quantity": "far_spread"}, res.spread, ts, res.spread <= ts))
    rows.append(Row({"quantity": "ablation_factor", "L": p.L_min}, res.ablation_factor, ta, res.ablation_factor >= ta))
    return Outcome(rows, {"far": res.far, "spread": res.spread, "ablation_factor": res.ablation_factor})


def exp_tail(p: TailParams, spec, seed, tol) -> Outcome:
    spec = _spec_or(spec, Oscillating(0.5, 1.0))
    res = cz.tail_sum_criterion(spec, s=p.s, L_grid=range(p.L_min, p.L_max + 1), j_max=p.j_max)
    t = tol.get("slope", 0.1)
    rows = [Row({"j": j, "L": L}, tail, b, tail <= b) for (j, L), tail, b in zip(res.pairs, res.tails, res.bounds)]
    rows += [Row({"L": L, "quantity": "sum"}, v) for L, v in res.per_L.items()]
    ok = abs(res.bound_slope - res.expected_slope) <= t
    rows.append(Row({"quantity": "bound_slope"}, res.bound_slope, t, ok))
    rows.append(Row({"quantity": "tail_slope"}, res.tail_slope))
    return Outcome(rows, {"sup": res.sup, "bound_slope": res.bound_slope, "tail_slope": res.tail_slope,
                          "expected_slope": res.expected_slope})


def exp_lambda(p: LambdaParams, spec, seed, tol) -> Outcome:
    c = cz.optimal_lambda(p.j, p.L, p.theta, p.regime, p.s, p.Q)
    t = tol.get("balance", 2.0)
    rows = [Row({"quantity": "Lambda", "regime": c.regime}, c.Lam),
            Row({"quantity": "balanced_Lambda"}, c.balanced_Lam),
            Row({"quantity": "imbalance"}, c.imbalance, t, c.imbalance <= t)]
    return Outcome(rows, {"Lambda": c.Lam, "balanced_Lambda": c.balanced_Lam, "imbalance": c.imbalance,
                          "log2_small": c.log2_small, "log2_large": c.log2_large,
                          "n1_membership": cz.split_n1_n2(p.j, p.Q)})


# -- acceptance battery ------------------------------------------------------------------


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    metrics: dict

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}"


SLOPE_CASES = (
    # theta, beta, j range over j theta > 0, grid points on [-4, 4)
    (0.5, 1.0, range(1, 25), 1 << 16),
    (2.0, 0.0, range(1, 7), 1 << 17),
    (-1.0, 2.0, range(-10, 0), 1 << 14),
)


def criterion_1() -> Criterion:
    worst = 0.0
    table = {}
    for theta, beta, js, N in SLOPE_CASES:
        spec = Oscillating(theta, beta)
        grid = piece_grid(N)
        pieces = {j: DyadicPiece(spec, DEFAULT_WINDOW, j, grid) for j in js}
        for s in (0.75, 1.0, 2.0):
            r = check_condition_pos(spec, s=s, j_range=js, grid=grid, pieces=pieces)
            e_inf, e_sob = expected_slopes(theta, beta, s)
            d = max(abs(r.slope_linf - e_inf), abs(r.slope_sobolev - e_sob))
            worst = max(worst, d)
            table[f"theta={theta:g},beta={beta:g},s={s:g}"] = {
                "linf": r.slope_linf, "linf_expected": e_inf, "sobolev": r.slope_sobolev, "sobolev_expected": e_sob}
    return Criterion(1, "class-condition slopes within 0.05", worst <= 0.05, {"max_error": worst, "slopes": table})


def criterion_2(seed: int = 0) -> Criterion:
    rng = np.random.default_rng(seed)
    g = UniformGrid(1, 8.0, 1 << 10)
    ks = [kr.key_estimate_ratio(kr.random_smooth_symbol(rng, g), 0.75, 1) for _ in range(100)]
    bad = sum(not k.holds for k in ks)
    return Criterion(2, "key estimate on 100 random symbols", bad == 0,
                     {"violations": bad, "max_ratio_over_constant": max(k.ratio / k.constant for k in ks),
                      "constant": ks[0].constant})


def criterion_3() -> Criterion:
    r = kr.large_part_l1(Oscillating(0.5, 2.0), s_prime=0.75, j_max=40)
    rate_ok = abs(r.rate - r.expected_rate) <= 0.25 * r.expected_rate
    tail_ok = r.tail_estimate < 1e-3
    monotone = bool(np.all(np.diff(r.partial_sums) > 0))
    return Criterion(3, "large part integrable, rate within 25%, tail < 1e-3 at j = 40",
                     rate_ok and tail_ok and monotone,
                     {"rate": r.rate, "expected_rate": r.expected_rate, "bound_rate": r.bound_rate,
                      "tail_estimate": r.tail_estimate, "last_increment": r.last_increment,
                      "partial_sum": r.partial_sums[-1], "bounds_hold": all(a <= b for a, b in zip(r.l1, r.bound_terms)),
                      "rate_ok": rate_ok, "tail_ok": tail_ok})


def criterion_4() -> Criterion:
    res = hb.heat_oracle_check()
    ok = res.max_rel_error <= 1e-6 and abs(res.mass - 1.0) <= 1e-3
    return Criterion(4, "heat kernel oracle 1e-6, mass 1 within 1e-3", ok,
                     {"max_rel_error": res.max_rel_error, "points": res.points, "mass": res.mass})


def criterion_5() -> Criterion:
    rep = hb.plancherel_check()
    ok = rep.max_deviation <= 0.02 and abs(rep.piece_slope - 4.0) <= 0.05
    return Criterion(5, "Plancherel ratio constant within 2%, piece slope 4 +- 0.05", ok,
                     {"ratios": dict(zip(rep.names, rep.ratios)), "constant": rep.constant,
                      "max_deviation": rep.max_deviation, "piece_slope": rep.piece_slope})


def criterion_6(seed: int = 0) -> Criterion:
    n, fails = cz_suite(1000, seed)
    return Criterion(6, "CZ invariants on 1000 random inputs", sum(fails.values()) == 0,
                     {"cases": n, "violations": fails})


def criterion_7() -> Criterion:
    grid = UniformGrid(1, 32.0, 1 << 17)
    fam = {"spike": cz.spike(grid)}
    good = cz.weak_type_probe(Oscillating(0.5, 1.0), fam, grid=grid)
    bad = cz.weak_type_probe(Oscillating(0.5, -0.5), fam, grid=grid)
    ok = good.spread < 1.3 and bad.monotone_growth
    return Criterion(7, "weak (1,1) constant stable within 1.3x; beta = -0.5 grows", ok,
                     {"constants": good.constants, "spread": good.spread,
                      "constants_unbounded": bad.constants, "monotone_growth": bad.monotone_growth})


def criterion_8() -> Criterion:
    res = cz.atom_test(Oscillating(0.5, 1.0), range(-6, 7), ablation_L=-6)
    ok = res.spread <= 1.5 and res.ablation_factor >= 3.0
    return Criterion(8, "atom far field within 1.5x over L in [-6, 6]; ablation >= 3x", ok,
                     {"far": dict(zip(res.Ls, res.far)), "spread": res.spread,
                      "ablation_factor": res.ablation_factor,
                      "near_bound_holds": all(a <= b for a, b in zip(res.near, res.near_bound))})


LP_STABLE = (0.1, 0.2, 0.25)
LP_GROWING = (0.35, 0.45)


def criterion_9() -> Criterion:
    dists = LP_STABLE + (0.3,) + LP_GROWING
    ps = [1 / (0.5 + d) for d in dists] + [1 / (0.5 - d) for d in dists]
    out = kr.lp_scan(Oscillating(0.5, 0.5), ps)
    table, ok = {}, True
    for r in out:
        d = round(abs(1 / r.p - 0.5), 6)
        table[fmt(r.p)] = {"distance": d, "exponent": r.exponent, "verdict": r.verdict}
        if d in LP_STABLE:
            ok &= r.verdict == "stable"
        elif d in LP_GROWING:
            ok &= r.verdict == "growing" and r.exponent > 0
    return Criterion(9, "L^p ladder stable for |1/p-1/2| <= 1/4, growing for >= 0.35", ok,
                     {"threshold": kr.GROWTH_EXPONENT, "scan": table})


def criterion_10() -> Criterion:
    res = cz.tail_sum_criterion(Oscillating(0.5, 1.0), s=0.75)
    holds = all(t <= b for t, b in zip(res.tails, res.bounds))
    ok = holds and abs(res.bound_slope - res.expected_slope) <= 0.1
    return Criterion(10, "tail summands under 2^(-(s-1/2)u) bound, slope within 0.1", ok,
                     {"bound_slope": res.bound_slope, "expected": res.expected_slope, "tail_slope": res.tail_slope,
                      "summands_under_bound": holds, "sup": res.sup})


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def exp_suite(p: SuiteParams, spec, seed, tol) -> Outcome:
    nums = sorted(p.criteria or CRITERIA)
    results = parallel_map(lambda k: CRITERIA[k](), nums)
    rows = [Row({"criterion": c.number, "title": c.title}, c.passed, None, c.passed) for c in results]
    return Outcome(rows, {f"criterion_{c.number}": {"pass": c.passed, **c.metrics} for c in results})


@dataclass(frozen=True)
class Experiment:
    name: str
    topic: str
    params: type
    run: Callable
    uses_multiplier: bool = True


EXPERIMENTS = {e.name: e for e in [
    Experiment("class-check", "class conditions on dyadic pieces", ClassCheckParams, exp_class_check),
    Experiment("kernel", "convolution kernel of a radial multiplier", KernelParams, exp_kernel),
    Experiment("fs-condition", "translation-difference kernel condition", FSParams, exp_fs),
    Experiment("key-estimate", "L^1 kernel bound by a Sobolev norm", KeyEstimateParams, exp_key_estimate, False),
    Experiment("lp-scan", "sharp L^p range along truncations", LpScanParams, exp_lp_scan),
    Experiment("plancherel", "Plancherel identity on H^1", PlancherelParams, exp_plancherel, False),
    Experiment("heat-oracle", "Laguerre synthesis vs heat kernel on H^1", HeatParams, exp_heat, False),
    Experiment("weighted-l2", "weighted L^2 kernel estimate on H^1", WeightedParams, exp_weighted),
    Experiment("mean-value", "mean value estimate on H^1", MeanValueParams, exp_mean_value, False),
    Experiment("key-lie-probe", "key estimate below the homogeneous dimension", KeyLieParams, exp_key_lie),
    Experiment("cz", "Calderon-Zygmund decomposition invariants", CZParams, exp_cz, False),
    Experiment("weak-type", "weak type (1,1) along truncations", WeakParams, exp_weak),
    Experiment("atom-test", "operator on Hardy-space atoms", AtomParams, exp_atom),
    Experiment("tail-sum", "kernel tail sums against the dyadic bound", TailParams, exp_tail),
    Experiment("lambda", "choice of the splitting scale in the atom argument", LambdaParams, exp_lambda, False),
    Experiment("paper-suite", "the full acceptance battery", SuiteParams, exp_suite, False),
]}
