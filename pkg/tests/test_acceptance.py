"""The ten acceptance checks, each printing one PASS/FAIL line.

All comparisons are exact rational equalities or strict signs.
"""

import json
import random
import time
from fractions import Fraction
from math import factorial

import pytest

from oracles import FLAGSHIP, UNIT_INTERVAL, reference_invariants
from kstab import criteria as crit
from kstab.cli import _family_members, _min_margin, corpus_dir
from kstab.errors import NotPolynomial, TrivialFlag
from kstab.geometry import PLConvexFunction
from kstab.invariants import (calibrate_constant, contained_components, df_intersection_raw,
                              df_log, df_twisted_intersection, df_untwisted, evaluate_config,
                              evaluate_model, j_functional)
from kstab.problem import parse_problem, parse_variety
from kstab.testconfig import BlowupModel, MonomialFlagIdeal, bridge, flag_blowup, toric_config
from kstab.toric import PolarizedToric, hirzebruch_fan, is_nef, product_p1_fan, projective_space_fan
from kstab.weights import (EXTRA_SAMPLES, coefficients, component_identity, fit_checked,
                           hilbert_relation_check, sample, tilde_a0)

F = Fraction


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def corpus():
    out = []
    for p in sorted((corpus_dir() / "problems").iterdir()):
        if p.name.startswith("fail_") or not p.name.endswith(".json"):
            continue
        out.append((p.name[:-5], parse_problem(json.loads(p.read_text()))))
    return out


def model_of(deg):
    if isinstance(deg, BlowupModel):
        return deg
    return bridge(deg)[2]


def line():
    return PolarizedToric(projective_space_fan(1), [0, 1])


def plane(d=1):
    return PolarizedToric(projective_space_fan(2), [0, 0, d])


def quadric():
    return PolarizedToric(product_p1_fan(), [0, 0, 1, 1])


def hirzebruch():
    return PolarizedToric(hirzebruch_fan(1), [0, 0, 1, 1])


def random_configs(count, seed=2024):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        X = rng.choice([line(), plane(), quadric()])
        n = X.dim
        npieces = rng.randint(1, 3)
        pieces = [(tuple(rng.randint(-2, 2) for _ in range(n)),
                   F(rng.choice([0, -1, 1, -2]), rng.choice([1, 2]))) for _ in range(npieces)]
        if len(out) % 5 == 0:
            pieces = [((0,) * n, F(rng.randint(-2, 2)))]
        f = PLConvexFunction(pieces, X.moment_polytope)
        out.append(toric_config(X, f, f.maximum() - f.minimum()))
    return out


EXTRA_FLAGS = [
    (line, 1, [[(1, 0)]]),
    (lambda: PolarizedToric(projective_space_fan(1), [0, 2]), 2, [[(2, 0)], [(1, 0)]]),
    (lambda: PolarizedToric(projective_space_fan(1), [0, 3]), 3, [[(3, 0)], [(2, 0)], [(1, 0)]]),
    (plane, 1, [[(1, 0, 0), (0, 1, 0)]]),
    (lambda: plane(2), 2, [[(2, 0, 0), (0, 1, 0)], [(1, 0, 0), (0, 1, 0)]]),
    (lambda: plane(2), 1, [[(1, 0, 0)]]),
    (quadric, 1, [[(1, 0, 0, 0), (0, 1, 0, 0)]]),
    (hirzebruch, 1, [[(1, 0, 0, 0), (0, 1, 0, 0)]]),
]


def extra_models():
    out = []
    for make, N, levels in EXTRA_FLAGS:
        B = flag_blowup(make(), MonomialFlagIdeal(N, levels))
        if B.semi_ample:
            out.append(B)
    return out


# 1 -------------------------------------------------------------------------------

def test_criterion_1_flagship(report):
    start = time.perf_counter()
    X = line()
    cfg = toric_config(X, PLConvexFunction(FLAGSHIP, X.moment_polytope), 1)
    rep = evaluate_config(cfg)
    elapsed = time.perf_counter() - start
    ref = reference_invariants(*UNIT_INTERVAL, FLAGSHIP, 1, 2)
    routes = set(rep.min_norm_routes.values())
    ok = (rep.df_untwisted == F(1, 4) == ref["df"] and rep.min_norm == F(1, 4) == ref["min_norm"]
          and routes == {F(1, 4)} and len(rep.min_norm_routes) >= 3
          and rep.l2_norm == F(5, 48) == ref["l2"] and elapsed < 1)
    report(1, ok, f"df {rep.df_untwisted}, min_norm {rep.min_norm} via "
                  f"{sorted(rep.min_norm_routes)}, l2 {rep.l2_norm}, oracle agrees, {elapsed:.2f}s")


# 2 -------------------------------------------------------------------------------

def test_criterion_2_dual_path(report):
    start = time.perf_counter()
    pairs = {}
    for name, prob in corpus():
        if getattr(prob.degeneration, "trivial", False):
            continue
        B = model_of(prob.degeneration)
        pairs.setdefault(B.n, []).append((df_untwisted(coefficients(B)), df_intersection_raw(B)))
    for B in extra_models():
        pairs.setdefault(B.n, []).append((df_untwisted(coefficients(B)), df_intersection_raw(B)))
    consts = {n: calibrate_constant(ps) for n, ps in pairs.items()}
    total = sum(len(ps) for ps in pairs.values())
    elapsed = time.perf_counter() - start
    ok = (total >= 12 and set(consts) == {1, 2}
          and all(c == 2 * factorial(n) for n, c in consts.items()) and elapsed < 60)
    shown = {n: str(c) for n, c in sorted(consts.items())}
    report(2, ok, f"{total} instances, c_n by dimension {shown} (2 n!), {elapsed:.1f}s")


# 3 -------------------------------------------------------------------------------

def test_criterion_3_triviality(report):
    bad = []
    count = 0
    for name, prob in corpus():
        deg = prob.degeneration
        rep = evaluate_model(deg) if isinstance(deg, BlowupModel) else evaluate_config(deg)
        trivial = deg.trivial if not isinstance(deg, BlowupModel) else False
        count += 1
        if not ((rep.min_norm == 0) == (rep.l2_norm == 0) == trivial):
            bad.append(name)
    for cfg in random_configs(20):
        rep = evaluate_config(cfg, kmax=400)
        count += 1
        if not ((rep.min_norm == 0) == (rep.l2_norm == 0) == cfg.trivial):
            bad.append(str(cfg.f.pieces))
    # a flag with a unit in I_0 is the trivial flag and is refused as such
    try:
        flag_blowup(line(), MonomialFlagIdeal(1, [[(0, 0)]]))
        bad.append("unit flag accepted")
    except TrivialFlag:
        pass
    report(3, not bad, f"{count} instances, mismatches {bad}")


# 4 -------------------------------------------------------------------------------

def test_criterion_4_products(report):
    vals = {}
    for label, X in (("P1", line()), ("P2", plane()), ("P1xP1", quadric()), ("F1", hirzebruch())):
        n = X.dim
        out = []
        for i in range(n):
            grad = tuple(int(j == i) for j in range(n))
            f = PLConvexFunction([(grad, 0)], X.moment_polytope)
            rep = evaluate_config(toric_config(X, f, f.maximum()))
            out.append((rep.df_untwisted, rep.min_norm))
        vals[label] = out
    ok = all(df == 0 and nm > 0 for lab in ("P1", "P2", "P1xP1") for df, nm in vals[lab])
    ok &= any(df != 0 for df, _ in vals["F1"])
    report(4, ok, "; ".join(f"{k}: " + ", ".join(f"df {d} norm {m}" for d, m in v)
                            for k, v in vals.items()))


# 5 -------------------------------------------------------------------------------

def test_criterion_5_inequalities(report):
    models = [model_of(p.degeneration) for _, p in corpus()
              if not getattr(p.degeneration, "trivial", False)]
    models += extra_models()
    models += [bridge(c)[2] for c in random_configs(8, seed=7) if not c.trivial]
    failed = []
    for B in models:
        nef = [B.base.fan.prime(i) for i in range(len(B.base.fan.rays))]
        nef = [D for D in nef if is_nef(D)]
        res = crit.check_inequalities(B, nef)
        if not res.certified:
            failed.append(res.witness)
    report(5, not failed, f"{len(models)} semi-ample models, failures {failed}")


# 6 -------------------------------------------------------------------------------

def test_criterion_6_identities(report):
    notes = []
    ok = True
    configs = [p.degeneration for _, p in corpus()
               if not isinstance(p.degeneration, BlowupModel) and not p.degeneration.trivial]
    for cfg in configs:
        n = cfg.n
        for a, b, lam, bt in component_identity(cfg):
            ok &= bt == (n + 1) * b - lam * a
        series = sample(cfg)
        ok &= tilde_a0(series) == n * coefficients(cfg).a0
        rep = evaluate_config(cfg)
        ok &= rep.min_norm_routes.get("J_L") == rep.min_norm
        for s in (1, 2, 3):
            scaled = evaluate_config(cfg.rescaled(s), kmax=400)
            ok &= scaled.min_norm == s ** (n + 1) * rep.min_norm
    notes.append(f"{len(configs)} configurations: component identity, a~0 = n a0, J_L, scaling")
    for B in extra_models():
        fan = B.base.fan
        k = len(fan.rays)
        T1 = fan.divisor([1] + [0] * (k - 1))
        T2 = fan.divisor([0] * (k - 1) + [F(1, 2)])
        ok &= j_functional(B, T1 + T2) == j_functional(B, T1) + j_functional(B, T2)
    notes.append("J additivity on the flag models")
    report(6, ok, "; ".join(notes))


# 7 -------------------------------------------------------------------------------

def test_criterion_7_hilbert(report):
    pairs = [
        (line(), [0, 2], [1, 0]),
        (plane(), [0, 0, 2], [1, 0, 0]),
        (plane(), [0, 0, 3], [0, 1, 1]),
        (quadric(), [0, 0, 2, 1], [1, 0, 0, 0]),
        (hirzebruch(), [0, 0, 2, 1], [0, 0, 0, 1]),
    ]
    rows = []
    for X, L, T in pairs:
        ok, got, want = hilbert_relation_check(X, X.fan.divisor(L), X.fan.divisor(T))
        rows.append((ok, got, want))
    report(7, all(r[0] for r in rows), f"a^0 fitted/expected {[(str(g), str(w)) for _, g, w in rows]}")


# 8 -------------------------------------------------------------------------------

def test_criterion_8_log(report):
    cases = []
    for _, prob in corpus():
        if prob.D is not None and prob.T is not None:
            cases.append((model_of(prob.degeneration), prob.T, [prob.D]))
    for B in extra_models():
        fan = B.base.fan
        k = len(fan.rays)
        T = fan.divisor([1] + [0] * (k - 1))
        Ds = [fan.divisor([2] + [0] * (k - 1))]
        if k == 2:
            Ds += [fan.divisor([0, 2]), fan.divisor([1, 1])]
        cases.append((B, T, Ds))
    bad = []
    count = 0
    for B, T, Ds in cases:
        tw = df_twisted_intersection(B, T)
        for D in Ds:
            count += 1
            val = df_log(B, T, D)
            if not (val <= tw and (val == tw) == (not contained_components(B, D))):
                bad.append((str(val), str(tw)))
    report(8, not bad and count > 0, f"{count} (model, D) pairs, violations {bad}")


# 9 -------------------------------------------------------------------------------

FLAG_CORPUS = {
    2: [{"N": 1, "levels": [[[1, 0]]]}, {"N": 2, "levels": [[[2, 0]], [[1, 0]]]},
        {"N": 1, "levels": [[[0, 1]]]}],
    3: [{"N": 1, "levels": [[[1, 0, 0], [0, 1, 0]]]}, {"N": 1, "levels": [[[1, 0, 0]]]},
        {"N": 2, "levels": [[[2, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, 1, 0]]]}],
    4: [{"N": 1, "levels": [[[1, 0, 0, 0], [0, 1, 0, 0]]]},
        {"N": 1, "levels": [[[0, 1, 0, 0], [0, 0, 1, 0]]]},
        {"N": 1, "levels": [[[0, 0, 0, 1]]]}, {"N": 1, "levels": [[[0, 0, 1, 0]]]}],
}


def test_criterion_9_shadow(report):
    margins = []
    for fam in ("p1_aubin", "p2_aubin", "f1_general_type"):
        raw = json.loads((corpus_dir() / "families" / f"{fam}.json").read_text())
        X, _, _, _ = parse_variety(raw["variety"])
        for s, L, T in _family_members(raw["family"], X):
            XL = X.with_polarization(L)
            if crit.check_general_type(XL, L, T).certified or crit.check_calabi_yau(XL, L, T).certified:
                margins.append((fam, s, _min_margin(X, L, T, FLAG_CORPUS[len(X.fan.rays)])))
    shadow_ok = bool(margins) and all(m is not None and m > 0 for _, _, m in margins)
    region_ok = True
    for n, X in ((1, line()), (2, plane())):
        for alpha in (F(1, 3), F(1, 2), F(2, 3)):
            for i in range(13):
                beta = F(i, 12)
                got = crit.check_aubin(X, beta, alpha).certified
                region_ok &= got == (beta <= min(alpha * (n + 1) / n, 1))
    report(9, shadow_ok and region_ok,
           f"{len(margins)} certified triples, least margin "
           f"{min(m for _, _, m in margins) if margins else None}; Aubin region exact: {region_ok}")


# 10 ------------------------------------------------------------------------------

def test_criterion_10_interpolation(report):
    series_count = 0
    held_ok = True
    objs = [p.degeneration for _, p in corpus()] + extra_models()
    for obj in objs:
        s = sample(obj)
        n = s.n
        for col, deg in ((1, n), (2, n + 1), (3, n + 2)):
            ks, ys = s.column(col)
            held_ok &= len(ks) - (deg + 1) >= EXTRA_SAMPLES
            fit_checked(ks, ys, deg)
            series_count += 1
    detected = 0
    trials = 0
    for obj in objs:
        s = sample(obj)
        ks, ys = s.column(2)
        for pos in range(len(ys)):
            bad = list(ys)
            bad[pos] += 1
            trials += 1
            try:
                fit_checked(ks, bad, s.n + 1)
            except NotPolynomial:
                detected += 1
    report(10, held_ok and detected == trials,
           f"{series_count} fitted series with >= {EXTRA_SAMPLES} held-out samples; "
           f"corruption detected {detected}/{trials}")
