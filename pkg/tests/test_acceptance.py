"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also repeated in pytest's terminal summary (see conftest.py).
Run directly with ``python tests/test_acceptance.py`` for just the summary.
"""

import json
import math
import subprocess
import sys
import time

import networkx as nx
import numpy as np
import pytest

from netpotential.balayage import Schedule, run_balayage
from netpotential.calculus import (
    check_divergence_theorem,
    check_integration_by_parts,
    divergence,
    gradient,
    laplacian,
    product_rule_sides,
)
from netpotential.generators import path_graph, random_connected_graph, random_domain
from netpotential.graph import Graph, boundary_mask
from netpotential.oracle import DirichletProblem, dirichlet_solve
from netpotential.perron import extremum_trace, is_in_perron_family, perron_iterate, perron_solve
from netpotential.potential import fundamental_solution, green_matrix

from conftest import DATA

RESULTS = {}
SEED = 20261015


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def instances(count, max_n, seed, min_n=2):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        G = random_connected_graph(int(rng.integers(min_n, max_n + 1)), rng)
        yield G, random_domain(G, rng), rng


def test_1_divergence_theorem():
    start = time.perf_counter()
    worst = 0.0
    for G, D, rng in instances(500, 50, SEED + 1):
        lhs, rhs = check_divergence_theorem(G, rng.standard_normal(G.m), D)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5
    assert report(1, "divergence theorem", ok,
                  f"500 triples, max |lhs-rhs|/(1+|lhs|) = {worst:.2e} (<= 1e-12), "
                  f"{elapsed:.2f}s (< 5s)")


def test_2_integration_by_parts_and_product_rule():
    start = time.perf_counter()
    ibp = prod = 0.0
    for G, D, rng in instances(500, 50, SEED + 2):
        U = rng.standard_normal(G.n)
        i = rng.standard_normal(G.m)
        lhs, bterm, vterm = check_integration_by_parts(G, U, i, D)
        ibp = max(ibp, abs(lhs - (bterm - vterm)) / (1 + abs(lhs)))
        a, b = product_rule_sides(G, U, i)
        prod = max(prod, float(np.max(np.abs(a - b) / (1 + np.abs(a)))))
    elapsed = time.perf_counter() - start
    ok = ibp <= 1e-12 and prod <= 1e-12 and elapsed < 5
    assert report(2, "integration by parts and product rule", ok,
                  f"500 triples, max relative defect {ibp:.2e} (parts), {prod:.2e} "
                  f"(product rule), {elapsed:.2f}s")


def test_3_div_grad_is_laplacian():
    worst = 0.0
    for G, _, rng in instances(500, 50, SEED + 3):
        U = rng.standard_normal(G.n)
        worst = max(worst, float(np.max(np.abs(divergence(G, gradient(G, U)) - laplacian(G, U)))))
    assert report(3, "div grad = Laplacian", worst <= 1e-14,
                  f"500 fields, max elementwise |div D U - L U| = {worst:.2e} (<= 1e-14)")


def test_4_maximum_principle():
    misses = 0
    for G, D, rng in instances(500, 50, SEED + 4):
        f = -rng.uniform(0.0, 1.0, G.n)
        U = dirichlet_solve(DirichletProblem(G, D, rhs=np.where(D.mask, f, 0.0),
                                             boundary_values=rng.standard_normal(G.n)))
        top, where = extremum_trace(G, U, D)
        if where is None or U[G.index[where]] != top:
            misses += 1
    assert report(4, "maximum principle", misses == 0,
                  f"500 subharmonic fields, {misses} without an exact boundary maximum")


def test_5_fundamental_solution():
    P3 = path_graph(3)
    cases = [("v1", "normalized", [2, 1, 0]), ("v2", "normalized", [2, 2, 0]),
             ("v2", "unnormalized", [1, 1, 0])]
    exact = all(np.allclose(fundamental_solution(P3, x, var).values, want, rtol=0, atol=1e-12)
                for x, var, want in cases)
    worst = 0.0
    for G, _, rng in instances(100, 60, SEED + 5):
        x = G.vertices[int(rng.integers(G.n))]
        if x == G.infinity:
            x = next(v for v in G.vertices if v != G.infinity)
        for var in ("normalized", "unnormalized"):
            phi = fundamental_solution(G, x, var).values
            res = -laplacian(G, phi, var)
            res[G.index[x]] -= 1
            res[G.index[G.infinity]] = 0
            worst = max(worst, float(np.max(np.abs(res))), abs(phi[G.index[G.infinity]]))
    ok = exact and worst <= 1e-10
    assert report(5, "fundamental solution", ok,
                  f"P3 values {'match' if exact else 'DIFFER'}; max residual on 100 graphs "
                  f"{worst:.2e} (<= 1e-10)")


def _off_infinity(G, M):
    idx = np.array([k for k in range(G.n) if k != G.index[G.infinity]])
    return M[np.ix_(idx, idx)], G.degrees[idx].astype(float)


def test_6_symmetry():
    plain = weighted = 0.0
    for G, _, _ in instances(50, 60, SEED + 6, min_n=3):
        sub, _ = _off_infinity(G, green_matrix(G, "unnormalized"))
        plain = max(plain, float(np.max(np.abs(sub - sub.T))))
        sub, deg = _off_infinity(G, green_matrix(G, "normalized"))
        w = sub * deg[None, :]
        weighted = max(weighted, float(np.max(np.abs(w - w.T))))
    regular = 0.0
    for k, (d, n) in enumerate([(3, 10), (4, 12), (3, 20), (5, 16), (6, 30)]):
        H = nx.random_regular_graph(d, n, seed=SEED + k)
        vs = [f"r{v}" for v in H.nodes]
        G = Graph(vs, [(f"r{a}", f"r{b}") for a, b in H.edges], vs[0])
        sub, _ = _off_infinity(G, green_matrix(G, "normalized"))
        regular = max(regular, float(np.max(np.abs(sub - sub.T))))
    ok = max(plain, weighted, regular) <= 1e-10
    assert report(6, "symmetry", ok,
                  f"50 graphs: unnormalized plain {plain:.2e}, normalized degree-weighted "
                  f"{weighted:.2e}; regular graphs plain {regular:.2e} (all <= 1e-10)")


def test_7_perron():
    worst = 0.0
    bad_order = bad_family = 0
    for G, D, rng in instances(100, 200, SEED + 7):
        g = rng.standard_normal(G.n)
        ref = dirichlet_solve(DirichletProblem(G, D, boundary_values=g))
        log = []
        u = perron_solve(G, D, g, log=log)
        closure = D.mask | boundary_mask(G, D)
        worst = max(worst, float(np.max(np.abs(u - ref)[closure])))
        prev = None
        for state, _ in zip(perron_iterate(G, D, g), log):
            cur = state.current
            if prev is not None and np.any(cur < prev):
                bad_order += 1
            if not is_in_perron_family(G, cur, D, g):
                bad_family += 1
            prev = cur
    ok = worst <= 1e-10 and bad_order == 0 and bad_family == 0
    assert report(7, "Perron solver", ok,
                  f"100 graphs <= 200 vertices, max |perron - direct| = {worst:.2e} "
                  f"(<= 1e-10); {bad_order} decreasing iterates, {bad_family} outside S_g")


def _p3_trace_ok():
    from netpotential.balayage import init_sweep, sweep_step

    s = init_sweep(path_graph(3), ["v1", "v2"], {"v1": 1})
    sweep_step(s, "v1")
    first = s.mu.tolist() == [0, 0.5, 0] and s.u.tolist() == [1, 0, 0]
    sweep_step(s, "v2")
    second = (s.mu.tolist() == [0.5, 0, 0] and s.boundary_accumulated.tolist() == [0, 0, 0.5]
              and s.u.tolist() == [1, 0.5, 0])
    return first and second


def test_8_balayage():
    start = time.perf_counter()
    tol = 1e-12
    residual = ledger = final = 0.0
    unswept = steps = 0
    for G, D, rng in instances(100, 200, SEED + 8):
        mu0 = np.zeros(G.n)
        mu0[D.indices] = rng.random(len(D))
        seed = int(rng.integers(2**31))
        for variant in ("normalized", "unnormalized"):
            ref = dirichlet_solve(DirichletProblem(G, D, rhs=mu0, variant=variant))
            w = G.degrees if variant == "normalized" else np.ones(G.n)
            initial = math.fsum((mu0 * w).tolist())
            for policy in ("round_robin", "greedy_max_mass", "random"):
                u, state = run_balayage(G, D, mu0, variant, Schedule(policy, seed), tol=tol)
                t = state.trace
                steps += len(t)
                residual = max(residual, float(t.column("max_residual").max()))
                unswept += int(np.count_nonzero(t.column("swept_mass_after")))
                total = t.column("interior_mass_after") + t.column("boundary_mass_after")
                ledger = max(ledger, float(np.max(np.abs(initial - total))))
                final = max(final, float(np.max(np.abs(u - ref))))
    elapsed = time.perf_counter() - start
    p3 = _p3_trace_ok()
    ok = (residual <= 1e-12 and unswept == 0 and ledger <= 1e-12 and final <= 100 * tol
          and p3 and elapsed < 60)
    assert report(8, "balayage", ok,
                  f"100 instances x 2 variants x 3 schedules, {steps} steps: max residual "
                  f"{residual:.2e}, {unswept} swept vertices left nonzero, ledger defect "
                  f"{ledger:.2e}, max |u - direct| {final:.2e} (<= {100 * tol:.0e}); "
                  f"P3 trace {'ok' if p3 else 'WRONG'}; {elapsed:.1f}s (< 60s)")


def test_9_cli_round_trip():
    p3 = str(DATA / "p3.json")
    outputs = {}
    for method in ("balayage", "direct"):
        cmd = [sys.executable, "-m", "netpotential", "solve", "poisson", p3, "--method", method,
               "--tol", "1e-12"]
        runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
        outputs[method] = runs
    identical = all(a == b for a, b in outputs.values())
    err = max(abs(json.loads(runs[0])[v] - want)
              for runs in outputs.values() for v, want in (("v1", 2), ("v2", 1), ("v3", 0)))
    ok = identical and err <= 1e-8
    assert report(9, "CLI round trip", ok,
                  f"both methods give (2,1,0) within {err:.2e} (<= 1e-8); repeated output "
                  f"{'byte-identical' if identical else 'DIFFERS'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
