"""Throwaway smoke checks of the core numerics (not part of the package)."""
import math

import numpy as np

import obscert as oc

rng = np.random.default_rng(0)

# 1. Gramian closed forms
s = oc.LinearSystem([[1.0]], [[1.0]])
g = oc.controllability_gramian(s, 1.0)
print("scalar G:", g.matrix[0, 0], "expected", (math.e**2 - 1) / 2,
      "rel err", abs(g.matrix[0, 0] - (math.e**2 - 1) / 2) / ((math.e**2 - 1) / 2))

rot = oc.builtin_system("rotation")
grot = oc.controllability_gramian(rot, 2 * math.pi)
print("rotation G:\n", grot.matrix, "\nexpected pi*I err:", np.abs(grot.matrix - math.pi * np.eye(2)).max())

# block vs quadrature on random systems
worst = 0.0
for _ in range(20):
    n = rng.integers(1, 9)
    m = rng.integers(1, 4)
    A = rng.standard_normal((n, n))
    A *= 3.0 / max(np.linalg.norm(A, 2), 1e-12)
    B = rng.standard_normal((n, m))
    sysr = oc.LinearSystem(A, B)
    T = float(rng.uniform(0.2, 5.0))
    g1 = oc.controllability_gramian(sysr, T)
    g2 = oc.gramian_by_quadrature(sysr, T)
    rel = np.linalg.norm(g1.matrix - g2.matrix) / np.linalg.norm(g1.matrix)
    worst = max(worst, rel)
print("block vs quadrature worst rel:", worst)

# 2. Komornik scalar value
s0 = oc.LinearSystem([[0.0]], [[1.0]])
ck = oc.komornik_gramian(s0, 1.0, 1.0)
expected = (1 - math.exp(-2)) / 2 + math.exp(-2) / 4
print("komornik scalar:", ck.matrix[0, 0], "expected", expected,
      "err", abs(ck.matrix[0, 0] - expected))
plan = oc.komornik_feedback(s0, 1.0, 1.0)
print("komornik scalar pole:", plan.certified_rate, "expected", -1 / expected)

# komornik rate guarantee on random controllable pairs
for lam in (0.5, 1.0, 2.0):
    worst_gap = -np.inf
    for _ in range(10):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 3))
        A = rng.standard_normal((n, n))
        A *= 2.0 / max(np.linalg.norm(A, 2), 1e-12)
        B = rng.standard_normal((n, m))
        sysr = oc.LinearSystem(A, B)
        if oc.kalman_decompose(sysr).rank < n:
            continue
        p = oc.komornik_feedback(sysr, 1.0, lam)
        worst_gap = max(worst_gap, p.certified_rate + lam)
    print(f"komornik lam={lam}: worst abscissa+lam = {worst_gap:.3e} (should be <= ~0)")

# 3. min-norm 1-D example
g0 = oc.controllability_gramian(s0, 1.0)
sol = oc.solve_min_norm(s0, g0, [1.0], 0.5)
print("1-D minnorm: r_bar", sol.adjoint_norm, "mu", sol.control_norm,
      "terminal", sol.terminal_state, "cost", sol.cost, "u0", sol.control[0])

# duality S = mu^2/2 random check + homogeneity
for _ in range(5):
    n = int(rng.integers(1, 7))
    A = rng.standard_normal((n, n))
    A *= 2.0 / max(np.linalg.norm(A, 2), 1e-12)
    B = rng.standard_normal((n, int(rng.integers(1, 3))))
    sysr = oc.LinearSystem(A, B)
    T = float(rng.uniform(0.3, 2.0))
    gr = oc.controllability_gramian(sysr, T)
    y0 = rng.standard_normal(n)
    alpha = float(rng.uniform(0.05, 0.8))
    try:
        solr = oc.solve_min_norm(sysr, gr, y0, alpha, grid=4097)
    except oc.InfeasibleError as e:
        print("infeasible instance", e)
        continue
    # trapezoid norm of sampled control
    mu_grid = math.sqrt(np.trapz((solr.control ** 2).sum(axis=1), solr.times))
    term = np.linalg.norm(solr.terminal_state)
    target = alpha * np.linalg.norm(y0)
    res = np.linalg.norm(gr.matrix @ solr.adjoint - oc.semigroup(sysr, T) @ y0
                         + target * solr.direction) if solr.adjoint_norm > 0 else 0.0
    sol3 = oc.solve_min_norm(sysr, gr, 3 * y0, alpha)
    print(f"n={n} mu={solr.control_norm:.6g} mu_grid_err={abs(mu_grid-solr.control_norm):.2e} "
          f"term_err={abs(term-target):.2e} stat_res={res:.2e} "
          f"homog_err={abs(sol3.control_norm - 3*solr.control_norm):.2e}")

# 4. weak constant: rotation closed form
for alpha in (0.1, 0.5, 0.9):
    rep = oc.weak_constant(rot, grot, alpha)
    exact = (1 - alpha) / math.sqrt(math.pi)
    print(f"weak rotation alpha={alpha}: {rep.value:.12g} exact {exact:.12g} err {abs(rep.value-exact):.2e}")

# weak vs oracle on random small systems
for _ in range(6):
    n = int(rng.integers(1, 4))
    A = rng.standard_normal((n, n))
    A *= 2.0 / max(np.linalg.norm(A, 2), 1e-12)
    B = rng.standard_normal((n, 1))
    sysr = oc.LinearSystem(A, B)
    T = float(rng.uniform(0.3, 2.0))
    gr = oc.controllability_gramian(sysr, T)
    alpha = float(rng.uniform(0.05, 0.9))
    w = oc.weak_constant(sysr, gr, alpha)
    o = oc.weak_constant_oracle(sysr, gr, alpha, 100000)
    rel = abs(w.value - o.value) / max(o.value, 1e-12) if math.isfinite(w.value) and math.isfinite(o.value) else float("nan")
    print(f"n={n} weak={w.value:.6g} oracle={o.value:.6g} rel={rel:.2e} methods={w.method}/{o.method}")

# limit alpha -> 0 vs null constant
for _ in range(4):
    n = int(rng.integers(1, 6))
    A = rng.standard_normal((n, n))
    A *= 2.0 / max(np.linalg.norm(A, 2), 1e-12)
    B = rng.standard_normal((n, max(1, n // 2)))
    sysr = oc.LinearSystem(A, B)
    if oc.kalman_decompose(sysr).rank < n:
        continue
    gr = oc.controllability_gramian(sysr, 1.0)
    nullc = oc.null_controllability_constant(sysr, gr)
    w = oc.weak_constant(sysr, gr, 1e-6)
    print(f"limit: null={nullc.value:.10g} weak(1e-6)={w.value:.10g} "
          f"rel={abs(w.value-nullc.value)/nullc.value:.2e}")

# 5. wave-heat
wh = oc.make_wave_heat(20, 0.3, 0.7)
kd = oc.kalman_decompose(wh)
N = 20
h = 1.0 / (N + 1)
heat = np.sort(-4 * np.sin(np.arange(1, N + 1) * math.pi / (2 * (N + 1))) ** 2 / h**2)
spec = np.sort(kd.uncontrollable_spectrum.real)
print("wave-heat rank:", kd.rank, "of", wh.n)
print("uncontrollable spectrum vs heat eigs max err:", np.abs(spec - heat).max(),
      "imag max:", np.abs(kd.uncontrollable_spectrum.imag).max())

# energy conservation of the wave part
y0 = np.zeros(wh.n)
y0[:2 * N] = rng.standard_normal(2 * N)
norms = []
for t in np.linspace(0, 10, 21):
    yt = oc.semigroup(wh, t) @ y0
    norms.append(np.linalg.norm(yt[:2 * N]))
print("wave energy drift:", max(norms) - min(norms))

# weak constant of wave-heat and concatenation
gwh = oc.controllability_gramian(wh, 0.5)
wwh = oc.weak_constant(wh, gwh, 0.5, starts=8)
print("wave-heat weak(0.5, T=0.5):", wwh.value)
plan = oc.concatenation_plan(wh, 0.5, 0.5, starts=8)
y0full = rng.standard_normal(wh.n)
run = oc.run_concatenation(wh, plan, y0full, 6, grid=64)
print("wave-heat measured rate:", run.measured_rate, "certified:", plan.certified_rate)
print("period norms ratio:", run.period_norms[1:] / run.period_norms[:-1])

# 6. shift-based complete stabilization
for target in (-1.0, -5.0, -10.0):
    p = oc.complete_stabilization_via_shift(rot, target, 1.0)
    print(f"shift target {target}: abscissa {p.certified_rate:.6g}")

# 7. sweep
est = oc.sweep_omega_star(s0, [0.1, 0.5], [0.25, 1.0], starts=4)
print("sweep integrator best:", est.best_rate, est.best_entry, est.unbounded_below)
decay = oc.LinearSystem([[-1.0]], [[0.0]])
est2 = oc.sweep_omega_star(decay, [0.1, 0.4, 0.8], [0.5, 1.0, 2.0, 4.0], starts=4)
print("sweep B=0 stable best:", est2.best_rate, est2.best_entry, est2.unbounded_below)
marg = oc.LinearSystem([[0.0]], [[0.0]])
est3 = oc.sweep_omega_star(marg, [0.1, 0.5, 0.9], [0.5, 1.0], starts=4)
print("sweep B=0 marginal best:", est3.best_rate, est3.best_entry)
