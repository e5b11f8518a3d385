"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed both inline and in the terminal summary."""

import json
import time
from fractions import Fraction

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import PyField, conv_distances
from trellex import ff
from trellex.cli import main
from trellex.construction import (
    ExpanderTrellisCode,
    all_messages,
    default_spec,
    ec_build_B,
    ec_column_bound_check,
    ec_theorem_main_report,
    ec_verify_claims,
    micro_spec,
)
from trellex.conv import ConvolutionalCode, cc_search_profile, column_distance_bound, free_distance_bound
from trellex.expander import cycle_graph, mixing_sweep, xg_complete, xg_gamma, xg_random_regular
from trellex.trellis import analogue_column_bound, random_deterministic_trellis, tc_bounds, tc_example1


def record(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = ""):
    passed = ok and elapsed < limit
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {title}  ({elapsed:.2f}s < {limit:g}s){'  ' + detail if detail else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert elapsed < limit, line


def test_1_convolutional_baseline():
    t0 = time.perf_counter()
    f = ff.make_field(2)
    code = ConvolutionalCode.from_polys(f, [[[1, 0, 1], [1, 1, 1]]])
    column = code.column_distances(5)
    free = code.free_distance()
    oracle_col, oracle_free = conv_distances(PyField(2, f.modulus), [c.tolist() for c in code.gen.coeffs], 12, 5)
    elapsed = time.perf_counter() - t0
    ok = column == [2, 3, 3, 4, 4, 5] == oracle_col and free == 5 == oracle_free
    record(1, "convolutional baseline (1+D^2, 1+D+D^2)", ok, elapsed, 5,
           f"column={column} free={free} oracle={oracle_col}/{oracle_free}")


def test_2_mdp_existence():
    t0 = time.perf_counter()
    f4 = ff.make_field(2, 2)
    res = cc_search_profile(2, 1, 1, f4, budget=1 << 20)
    free = res.code.free_distance()
    elapsed = time.perf_counter() - t0
    column_bounds = [column_distance_bound(2, 1, j) for j in range(3)]
    ok = (
        res.exhaustive
        and list(res.profile) == column_bounds == [2, 3, 4]
        and free == free_distance_bound(2, 1, 1) == 4
        and not res.chain_violations
    )
    record(2, "MDP (2,1,1) code over GF(4)", ok, elapsed, 30,
           f"profile={list(res.profile)} free={free} evaluated={res.evaluated} chain_violations={len(res.chain_violations)}")


def test_3_large_column_distance_example():
    t0 = time.perf_counter()
    ex = tc_example1(8, 4, 2, 1)
    rep = tc_bounds(ex.code, 1, with_free=False, M=4)
    analogue = analogue_column_bound(8, 2, 4, 1)
    elapsed = time.perf_counter() - t0
    d1 = rep.column[1]
    ok = (
        len(ex.codebook) == 16
        and d1 == 4
        and analogue == Fraction(11, 3)
        and Fraction(d1) > analogue
        and rep.column_bound_int[1] == 4 == d1
        and rep.ok
    )
    record(3, "trellis code beating the convolutional analogue", ok, elapsed, 1,
           f"|C_1|={len(ex.codebook)} d_1={d1} analogue={analogue} bound={rep.column_bound[1]} int={rep.column_bound_int[1]}")


def test_4_spectral_and_mixing():
    t0 = time.perf_counter()
    complete = max(xg_gamma(xg_complete(n)).gamma for n in range(1, 65))
    cycle = xg_gamma(cycle_graph(3)).gamma
    graphs = [xg_complete(8), xg_complete(64), cycle_graph(3)]
    graphs += [xg_random_regular(n, d, seed) for seed, (n, d) in enumerate([(6, 3), (10, 4), (16, 5), (32, 7), (64, 9)])]
    failures = 0
    for g in graphs:
        failures += mixing_sweep(g, xg_gamma(g).gamma, 1000, seed=7)["failures"]
    elapsed = time.perf_counter() - t0
    ok = complete <= 1e-12 and abs(cycle - 0.5) <= 1e-9 and failures == 0
    record(4, "spectral gamma and mixing inequality", ok, elapsed, 10,
           f"max gamma(K_n,n)={complete:.1e} gamma(C6)={cycle:.12f} mixing failures={failures}/{1000 * len(graphs)}")


def test_5_micro_end_to_end():
    t0 = time.perf_counter()
    spec = micro_spec()
    ic = ec_build_B(spec, cross_check=True)
    words = sorted(map(tuple, ic.codewords().tolist()))
    etc = ExpanderTrellisCode(spec)
    rank0 = ff.rank(spec.field, etc.lifted.blocks[0])
    claims = ec_verify_claims(etc, all_messages(etc.k, 2, 2), exhaustive=True)
    d0 = etc.column_distances(0)[0]
    bound = ec_column_bound_check(etc, xg_gamma(spec.graph).gamma, 0)[0]
    elapsed = time.perf_counter() - t0
    ok = (
        words == [(0, 0, 0, 0), (1, 1, 1, 1)]
        and etc.k == 1 == rank0
        and claims.passed and claims.exhaustive
        and d0 == 2
        and spec.theta == 1
        and bound.achieved_ratio == bound.bound == 1
    )
    record(5, "micro instance K_2,2 / repetition / parity", ok, elapsed, 1,
           f"B={words} k~={etc.k} rank(G~_0)={rank0} d_0={d0} bound={bound.bound}")


def test_6_default_instance():
    t0 = time.perf_counter()
    spec = default_spec()
    rep = ec_theorem_main_report(spec, horizon=1, samples=1000, seed=7)
    elapsed = time.perf_counter() - t0
    v = rep["verdicts"]
    ok = (
        spec.graph.n == 5 and spec.delta == 5 and rep["gamma"] <= 1e-12
        and rep["r"] == "4/5" and rep["theta"] == "2/5"
        and spec.dimension_lower_bound() == 5 and rep["dim_B"] >= 5
        and rep["claims"]["samples"] == 1000 and v["claims"]
        and rep["witness"]["checked"] == 1000 and rep["witness"]["lambda_sums"] == ["1"]
        and v["lemma_column"] and v["packed_column_brute_agrees"]
        and rep["passed"]
    )
    record(6, "default K_5,5 instance over GF(4)", ok, elapsed, 300,
           f"k~={rep['dim_B']} packed_column={rep['packed_column']} brute={rep['packed_column_brute']} "
           f"outer_column={rep['outer_column']}")


def test_7_trellis_bound_battery():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240607)
    violations, with_free, analogue_checked = [], 0, 0
    for i in range(100):
        q = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        M = int(rng.integers(2, min(q**n, 16) + 1))
        V = int(rng.integers(1, 17))
        t = random_deterministic_trellis(V, q, n, M, rng)
        rep = tc_bounds(t, 4)
        with_free += rep.free is not None
        analogue_checked += sum(rep.analogue_applicable)
        if not rep.ok or "free_bound" not in rep.verdicts:
            violations.append((i, rep.verdicts))
    elapsed = time.perf_counter() - t0
    record(7, "trellis bound battery (100 presentations)", not violations, elapsed, 120,
           f"free distances={with_free} analogue checks={analogue_checked} violations={violations[:3]}")


def test_8_negative_controls(tmp_path, capsys):
    t0 = time.perf_counter()
    micro = {"conv": {"field": {"p": 2}, "G": [[[1], [1]]]}, "inner": {"type": "parity"},
             "graph": {"type": "complete", "n": 2}, "kind": "construction"}
    cases = {
        "rank_deficient_G0": (dict(micro, override_G0=[[0, 0, 0, 0]]), "RankAssertionFailed"),
        "non_deterministic": ({"kind": "trellis", "text": "2 1 2 2\n0 0 0\n0 1 0\n1 0 1\n1 1 0\n", "j": 2},
                              "NotDeterministic"),
    }
    results = {}
    for name, (obj, expected) in cases.items():
        d = tmp_path / name
        d.mkdir()
        (d / f"{name}.json").write_text(json.dumps(obj))
        code = main(["verify-all", "--fixtures", str(d), "--fixtures-only"])
        rep = json.loads(capsys.readouterr().out)
        results[name] = (code, rep["checks"][0]["status"], rep["checks"][0]["detail"].get("error"), expected)
    clean = main(["verify-all"])
    clean_rep = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - t0
    ok = clean == 0 and clean_rep["passed"] and all(
        code == 2 and status == "verdict_failure" and err == exp for code, status, err, exp in results.values())
    record(8, "negative controls exit 2", ok, elapsed, 120,
           f"clean battery exit={clean} tampered={ {k: v[:3] for k, v in results.items()} }")
