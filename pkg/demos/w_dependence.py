"""How the inner cap picks the limit spectrum of a single gamma = 0 channel.

With a Dirichlet inner cap the harmonic r^0 is not compatible with the cap,
so the limit keeps the r^1 branch and the eigenvalues tend to (k pi)^2. A
Neumann cap accepts the constant, the channel joins W, and the limit becomes
((k - 1/2) pi)^2. Both sweeps converge at rate eps^1.

Run:  python demos/w_dependence.py
"""

import math

from conespec.channel_model import CapCondition, Channel, Geometry, compute_w_decision
from conespec.convergence_lab import match_and_fit, sweep

EPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

for name, cap in (("dirichlet", CapCondition.dirichlet()), ("neumann", CapCondition.neumann())):
    geom = Geometry((Channel(0.0, 1),), r0=0.5, cap_m2=cap)
    w = compute_w_decision(geom)
    print(f"inner cap {name}: W = {list(w.w_members)}, T(0) = {w.t_scalar[0.0]:.4f}")
    table = sweep(geom, EPS, count=3)
    for fit in match_and_fit(table):
        k = fit.n
        closed = (k * math.pi) ** 2 if name == "dirichlet" else ((k - 0.5) * math.pi) ** 2
        print(f"  N={k}: lambda(1e-6) = {table.value(1e-6, k):.8f}  limit = {fit.limit_lambda:.8f}"
              f"  closed form {closed:.8f}  rate eps^{fit.exponent:.3f}")
    print()
