import math
import numpy as np
import obscert as oc
from obscert.gramian import komornik_gramian
from obscert.stabilize import spectral_abscissa

rng = np.random.default_rng(1)
rows = []
for trial in range(40):
    n = int(rng.integers(1, 7))
    m = int(rng.integers(1, n + 1))
    A = rng.standard_normal((n, n))
    A *= 2.0 / max(np.linalg.norm(A, 2), 1e-12)
    B = rng.standard_normal((n, m))
    s = oc.LinearSystem(A, B)
    if oc.kalman_decompose(s).rank < n:
        continue
    for lam in (0.5, 1.0, 2.0):
        C = komornik_gramian(s, 1.0, lam, rtol=1e-13)
        cond = C.eigenvalues[0] / C.eigenvalues[-1] if C.eigenvalues[-1] > 0 else math.inf
        K = -np.linalg.solve(C.matrix, B).T
        rate = spectral_abscissa(A + B @ K)
        gap = rate + lam
        rows.append((n, m, lam, cond, gap))

rows.sort(key=lambda r: -r[4])
print("worst gaps (rate + lam, should be <= 0):")
for r in rows[:8]:
    print(f"  n={r[0]} m={r[1]} lam={r[2]} cond={r[3]:.2e} gap={r[4]:+.3e}")
print("max cond:", max(r[3] for r in rows))
print("num gap > 1e-3:", sum(1 for r in rows if r[4] > 1e-3))
print("num gap > 0:", sum(1 for r in rows if r[4] > 0))
