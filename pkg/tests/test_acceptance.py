"""Acceptance criteria, one test each. Run alone with ``pytest -m acceptance -v``.

A pass/fail line per criterion is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from eapdtw.bounds import compute_envelope, lb_keogh, lb_kim_fl
from eapdtw.kernels import (
    KernelTrace,
    dtw_full,
    dtw_left_prune,
    dtw_windowed,
    ea_pruned_dtw,
    is_pruned,
)
from eapdtw.search import SUPPORTED_RATIOS, SearchConfig, similarity_search

from oracles import batch_znormalize, brute_force_search, dtw_recursive

pytestmark = pytest.mark.acceptance

S = [3.0, 1.0, 4.0, 4.0, 1.0, 1.0]
T = [1.0, 3.0, 2.0, 1.0, 2.0, 2.0]

ALGOS = ("full", "lp", "eap")
LENGTHS = (128, 512)
REFERENCE_LENGTH = 100_000


def detail(request, text):
    request.node.user_properties.append(("detail", text))


def best_time(fn, repeat=5):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cells(kernel, *args):
    trace = KernelTrace(capture_matrix=False)
    value = kernel(*args, trace=trace)
    return value, trace.cells_evaluated


@pytest.mark.criterion(1, "worked example: distance 9, cells (2,2)=8, (3,4)=14, max 22")
def test_criterion_1_worked_example(request):
    def run():
        trace = KernelTrace()
        return dtw_full(S, T, trace=trace), trace

    elapsed = best_time(run)
    value, trace = run()
    detail(request, f"{elapsed * 1e3:.3f} ms")
    assert value == 9
    assert trace.value_at(2, 2) == 8
    assert trace.value_at(3, 4) == 14
    assert trace.max_value() == 22
    assert elapsed < 1e-3


@pytest.mark.criterion(2, "early-abandon fixtures on the worked example")
def test_criterion_2_abandon_fixtures(request):
    def run():
        t_eap = KernelTrace()
        t_lp = KernelTrace()
        return (
            ea_pruned_dtw(S, T, 9.0),
            ea_pruned_dtw(S, T, 6.0, trace=t_eap),
            dtw_left_prune(S, T, 6.0, trace=t_lp),
            t_eap,
            t_lp,
        )

    elapsed = best_time(run)
    at9, at6, lp6, t_eap, t_lp = run()
    detail(request, f"{elapsed * 1e3:.3f} ms")
    assert at9 == 9
    assert is_pruned(at6)
    assert t_eap.abandon_cell == (5, 3)
    assert is_pruned(lp6)
    assert t_lp.abandon_cell[0] == 5
    assert max(r for r, _, _ in t_lp.matrix_cells) == 5
    assert elapsed < 1e-3


@pytest.mark.criterion(3, "1,000 random pairs: recursion oracle and bit-exact tiers")
def test_criterion_3_oracle_equivalence(request):
    rng = np.random.default_rng(3)
    pairs = [
        (rng.uniform(-3, 3, rng.integers(2, 17)), rng.uniform(-3, 3, rng.integers(2, 17)))
        for _ in range(1000)
    ]
    dtw_full(*pairs[0]), ea_pruned_dtw(*pairs[0]), dtw_left_prune(*pairs[0])
    bad_oracle = bad_tier = 0
    t0 = time.perf_counter()
    for s, t in pairs:
        d = dtw_full(s, t)
        if not math.isclose(d, dtw_recursive(s, t), rel_tol=1e-9):
            bad_oracle += 1
        if ea_pruned_dtw(s, t, math.inf) != d or dtw_left_prune(s, t, math.inf) != d:
            bad_tier += 1
    elapsed = time.perf_counter() - t0
    detail(request, f"oracle mismatches {bad_oracle}, tier mismatches {bad_tier}, {elapsed:.2f} s")
    assert bad_oracle == 0
    assert bad_tier == 0
    assert elapsed < 10


def _threshold(rng, d):
    kind = rng.integers(5)
    if kind == 0:
        return d
    if kind == 1:
        return d * rng.uniform(0, 2)
    if kind == 2:
        return float(np.nextafter(d, -math.inf)) if rng.random() < 0.5 else float(np.nextafter(d, math.inf))
    if kind == 3:
        return rng.uniform(0, 3 * d + 1)
    return math.inf if rng.random() < 0.5 else 0.0


@pytest.fixture(scope="module")
def sweep():
    """10,000 (S, T, ub) triples with a second paired threshold per triple."""
    rng = np.random.default_rng(4)
    ea_pruned_dtw(S, T, 1.0, trace=KernelTrace(capture_matrix=False))
    dtw_left_prune(S, T, 1.0, trace=KernelTrace(capture_matrix=False))
    rows = []
    ties = 0
    t0 = time.perf_counter()
    for _ in range(10_000):
        s = rng.uniform(-3, 3, rng.integers(1, 25))
        t = rng.uniform(-3, 3, rng.integers(1, 25))
        d, full_cells = cells(dtw_full, s, t)
        ub = _threshold(rng, d)
        ties += ub == d
        ub2 = _threshold(rng, d)
        eap, eap_cells = cells(ea_pruned_dtw, s, t, ub)
        lp, lp_cells = cells(dtw_left_prune, s, t, ub)
        eap2, eap_cells2 = cells(ea_pruned_dtw, s, t, ub2)
        lp2, lp_cells2 = cells(dtw_left_prune, s, t, ub2)
        rows.append(dict(
            d=d, ub=ub, ub2=ub2, eap=eap, lp=lp, eap2=eap2, lp2=lp2, full_cells=full_cells,
            eap_cells=eap_cells, lp_cells=lp_cells, eap_cells2=eap_cells2, lp_cells2=lp_cells2,
        ))
    return rows, ties, time.perf_counter() - t0


def _contract_ok(value, d, ub):
    if d <= ub:
        return value == d
    return is_pruned(value)


@pytest.mark.criterion(4, "early-abandon contract over 10,000 (S, T, ub) triples")
def test_criterion_4_contract(request, sweep):
    rows, ties, elapsed = sweep
    violations = 0
    tie_failures = 0
    for r in rows:
        for ub, eap, lp in ((r["ub"], r["eap"], r["lp"]), (r["ub2"], r["eap2"], r["lp2"])):
            if not (_contract_ok(eap, r["d"], ub) and _contract_ok(lp, r["d"], ub)):
                violations += 1
            if ub == r["d"] and not (eap == r["d"] and lp == r["d"]):
                tie_failures += 1
    detail(request, f"violations {violations}, tie cases {ties}, tie failures {tie_failures}, {elapsed:.2f} s")
    assert ties > 1000
    assert violations == 0
    assert tie_failures == 0
    assert elapsed < 30


@pytest.mark.criterion(5, "cell-count dominance and threshold monotonicity")
def test_criterion_5_dominance(request, sweep):
    rows, _, _ = sweep
    dominance = monotone = 0
    for r in rows:
        for e, l in ((r["eap_cells"], r["lp_cells"]), (r["eap_cells2"], r["lp_cells2"])):
            if not e <= l <= r["full_cells"]:
                dominance += 1
        lo, hi = ("", "2") if r["ub"] <= r["ub2"] else ("2", "")
        if r["eap_cells" + lo] > r["eap_cells" + hi] or r["lp_cells" + lo] > r["lp_cells" + hi]:
            monotone += 1
    detail(request, f"dominance violations {dominance}, monotonicity violations {monotone}")
    assert dominance == 0
    assert monotone == 0


@pytest.mark.criterion(6, "lower-bound soundness over 10,000 normalized pairs")
def test_criterion_6_lower_bounds(request):
    rng = np.random.default_rng(6)
    cases = []
    for _ in range(10_000):
        n = int(rng.integers(2, 65))
        q = batch_znormalize(np.cumsum(rng.standard_normal(n)))
        c = batch_znormalize(np.cumsum(rng.standard_normal(n)))
        cases.append((q, c, int(rng.integers(0, n + 1))))
    q, c, w = cases[0]
    lb_keogh(compute_envelope(q, w), c), dtw_windowed(q, c, w), lb_kim_fl(q, c)
    kim_bad = keogh_bad = sandwich_bad = 0
    t0 = time.perf_counter()
    for q, c, w in cases:
        env = compute_envelope(q, w)
        if not (np.all(env.lower <= q) and np.all(q <= env.upper)):
            sandwich_bad += 1
        if lb_kim_fl(q, c) > dtw_full(q, c):
            kim_bad += 1
        if lb_keogh(env, c).total > dtw_windowed(q, c, w):
            keogh_bad += 1
    elapsed = time.perf_counter() - t0
    detail(request, f"kim {kim_bad}, keogh {keogh_bad}, sandwich {sandwich_bad} violations, {elapsed:.2f} s")
    assert kim_bad == keogh_bad == sandwich_bad == 0
    assert elapsed < 30


@pytest.fixture(scope="module")
def searches():
    """Every search needed by criteria 7 to 9 on one seeded random walk."""
    rng = np.random.default_rng(2024)
    reference = np.cumsum(rng.standard_normal(REFERENCE_LENGTH))
    query = np.cumsum(rng.standard_normal(max(LENGTHS)))
    similarity_search(reference[:1000], query, SearchConfig(16, 0.1))
    out = {"oracle": {}, "runs": {}, "oracle_time": 0.0, "search_time": 0.0, "untightened_time": 0.0}
    for m in LENGTHS:
        for ratio in SUPPORTED_RATIOS:
            w = SearchConfig(m, ratio).window_cells
            t0 = time.perf_counter()
            out["oracle"][m, ratio] = brute_force_search(reference, query[:m], w)
            out["oracle_time"] += time.perf_counter() - t0
            for algo in ALGOS:
                for lb, tighten in ((True, True), (False, False), (True, False)):
                    t0 = time.perf_counter()
                    bsf, report = similarity_search(
                        reference, query, SearchConfig(m, ratio, algo, lb, tighten)
                    )
                    key = "untightened_time" if lb and not tighten else "search_time"
                    out[key] += time.perf_counter() - t0
                    out["runs"][m, ratio, algo, lb, tighten] = (bsf, report)
    return out


@pytest.mark.criterion(7, "search invariance on a 100,000-sample random walk, six configs vs brute force")
def test_criterion_7_search_invariance(request, searches):
    mismatches = []
    conservation = 0
    for m in LENGTHS:
        for ratio in SUPPORTED_RATIOS:
            want_loc, want_d = searches["oracle"][m, ratio]
            got = set()
            for algo in ALGOS:
                for lb in (True, False):
                    bsf, r = searches["runs"][m, ratio, algo, lb, lb]
                    got.add((bsf.location, bsf.distance_sq))
                    if r.candidates_total != r.pruned_kim + r.pruned_keogh_eq + r.pruned_keogh_ec + r.dtw_calls:
                        conservation += 1
                    if not 0 <= r.dtw_abandoned <= r.dtw_calls:
                        conservation += 1
                    if r.candidates_total != REFERENCE_LENGTH - m + 1:
                        conservation += 1
            (loc, d), = got if len(got) == 1 else [(None, None)]
            if loc != want_loc or not math.isclose(d, want_d, rel_tol=1e-9):
                mismatches.append((m, ratio, sorted(got), (want_loc, want_d)))
    elapsed = searches["oracle_time"] + searches["search_time"]
    detail(
        request,
        f"mismatches {len(mismatches)}, conservation violations {conservation}, "
        f"search {searches['search_time']:.1f} s + oracle {searches['oracle_time']:.1f} s",
    )
    assert not mismatches, mismatches
    assert conservation == 0
    assert elapsed < 600


def _no_lb_cells(searches, m, algo):
    return [searches["runs"][m, r, algo, False, False][1].dp_cells_evaluated for r in SUPPORTED_RATIOS]


@pytest.mark.criterion(8, "work reduction: eap at least 2x fewer cells than full, sublinear in window")
def test_criterion_8_work_reduction(request, searches):
    full = {m: _no_lb_cells(searches, m, "full") for m in LENGTHS}
    eap = {m: _no_lb_cells(searches, m, "eap") for m in LENGTHS}
    factor = sum(map(sum, full.values())) / sum(map(sum, eap.values()))
    growth = {m: (eap[m][-1] / eap[m][0], full[m][-1] / full[m][0]) for m in LENGTHS}
    detail(
        request,
        f"aggregate factor {factor:.2f}; growth 0.1->0.5 eap vs full "
        + ", ".join(f"m={m}: {g[0]:.2f} vs {g[1]:.2f}" for m, g in growth.items()),
    )
    assert factor >= 2
    for m in LENGTHS:
        assert all(e < f for e, f in zip(eap[m], full[m]))
        assert growth[m][0] < growth[m][1]


@pytest.mark.criterion(9, "tightening on/off: identical results, no more cells when on")
def test_criterion_9_tightening(request, searches):
    differ = []
    tight = loose = 0
    for m in LENGTHS:
        for ratio in SUPPORTED_RATIOS:
            for algo in ALGOS:
                a, ra = searches["runs"][m, ratio, algo, True, True]
                b, rb = searches["runs"][m, ratio, algo, True, False]
                if (a.location, a.distance_sq) != (b.location, b.distance_sq):
                    differ.append((m, ratio, algo))
                tight += ra.dp_cells_evaluated
                loose += rb.dp_cells_evaluated
    detail(request, f"differences {len(differ)}, cells tightened {tight} vs untightened {loose}")
    assert not differ, differ
    assert tight <= loose
