"""Betti bookkeeping for glued manifolds and the small eigenvalues it forces.

For each catalog decomposition M = M1 u M2 along Sigma the Mayer-Vietoris
check must succeed, and bumping any single Betti number must break it. The
prediction table lists, for D^(n1+1) x S^n2 glued to S^n1 x D^(n2+1), the
channel gamma carrying the volume form of S^n2 and the degrees in which small
eigenvalues appear.

Run:  python demos/glued_spheres.py
"""

from conespec.topology import l2_cohomology, load_decompositions, mv_check, predict_small_eigenvalues

for c in load_decompositions()[:8]:
    rep = mv_check(c)
    bumped = mv_check(c.replace("betti_M", 1, c.betti_M[1] + 1))
    l2 = []
    for k in range(c.m + 1):
        try:
            l2.append(l2_cohomology(c, k))
        except ValueError:
            l2.append("?")
    print(f"{c.name:>14}: consistent={rep.consistent}, bumped b1(M) consistent={bumped.consistent}, "
          f"L2 cohomology {l2}")

print()
for n1, n2 in ((1, 1), (2, 1), (3, 1), (2, 2), (3, 2)):
    p = predict_small_eigenvalues(n1, n2)
    where = "; ".join(f"{x.target} in degrees {x.degrees}" for x in p.predictions)
    print(f"n1={n1} n2={n2}: gamma={p.gamma:+g} ({p.domain} domain"
          f"{', boundary case' if p.boundary_case else ''}): {where}")
