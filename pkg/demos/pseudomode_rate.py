"""The gamma = 1/2 pseudomode and its logarithmic Rayleigh quotient.

psi = |log eps|^-1/2 xi(r) r^-1/2 is built from the harmonic the inner cap
accepts. Its Rayleigh quotient decays like c / |log eps|, and so does the
lowest true eigenvalue of that channel. The gamma = 1/4 control has no such
quasimode and levels off at a positive floor.

Run:  python demos/pseudomode_rate.py
"""

import math

from conespec.radial_solver import RadialProblem, shoot_eigenvalues
from conespec.spectra import pseudomode_quotient
from conespec.verification import zero_mode_geometry

geom = zero_mode_geometry()
print(f"{'eps':>8} {'q * |log eps|':>14} {'lambda_1 * |log eps|':>21} {'control q':>10}")
for k in range(2, 9):
    eps = 10.0 ** -k
    L = abs(math.log(eps))
    q = pseudomode_quotient(geom, eps).rayleigh
    p = RadialProblem.for_channel(0.5, (eps * geom.r0, 1.0), geom.cap_m2_for(0.5),
                                  geom.cap_m1_for(0.5), 1)
    lam = shoot_eigenvalues(p)[0]
    control = pseudomode_quotient(geom, eps, 0.25).rayleigh
    print(f"{eps:8.0e} {q * L:14.4f} {lam * L:21.4f} {control:10.4f}")
