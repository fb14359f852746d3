import warnings
import numpy as np
import obscert as oc

wh = oc.make_wave_heat(20, 0.3, 0.7)
print("||A||:", np.linalg.norm(wh.A, 2))

with warnings.catch_warnings():
    warnings.simplefilter("error")
    try:
        g = oc.controllability_gramian(wh, 0.5)
        print("gramian: no warning")
    except Warning as w:
        print("gramian warns:", w)

g = oc.controllability_gramian(wh, 0.5)
print("G finite:", np.all(np.isfinite(g.matrix)), "rank:", g.rank())

# quadrature reference
gq = oc.gramian_by_quadrature(wh, 0.5, panels=64, order=16)
rel = np.linalg.norm(g.matrix - gq.matrix) / np.linalg.norm(gq.matrix)
print("block vs quadrature rel:", rel)

rng = np.random.default_rng(3)
y0 = rng.standard_normal(wh.n)
sol = oc.solve_min_norm(wh, g, y0, 0.5, grid=64)
print("control finite:", np.all(np.isfinite(sol.control)))

plan = oc.concatenation_plan(wh, 0.5, 0.5, starts=4)
run = oc.run_concatenation(wh, plan, y0, 3, grid=32)
print("states finite:", np.all(np.isfinite(run.states)))
print("controls finite:", np.all(np.isfinite(run.controls)))
