"""Counting eigenvalues that collapse to zero.

The geometry mixes channels whose inner caps admit decaying harmonics
(Robin(-gamma) keeps r^-gamma exactly) with ordinary Dirichlet channels. The
W decision predicts how many eigenvalues go to zero: the gamma = 1/2 pair,
one kernel element of the collapsing piece (gamma = 3/4) and one limit
kernel element (gamma = 1/4, whose outer cap matches r^-1/4). The count of
eps-eigenvalues below 10 / |log eps| should equal that total.

Run:  python demos/zero_modes.py
"""

import math

from conespec.channel_model import compute_w_decision
from conespec.spectra import eps_spectrum, limit_spectrum
from conespec.verification import zero_mode_geometry

geom = zero_mode_geometry()
w = compute_w_decision(geom)
print(f"W = {list(w.w_members)}; half-bound states {w.i_half}, D2 kernel {w.dim_ker_D2}, "
      f"limit kernel {w.dim_ker_limit}: {w.zero_mult} zero modes expected")
print("limit spectrum (nonzero part):",
      ", ".join(f"{e.lam:.4f}" for e in limit_spectrum(geom, w, count=6).entries))
for eps in (1e-4, 1e-6, 1e-8):
    rep = eps_spectrum(geom, eps, count=10)
    thr = 10.0 / abs(math.log(eps))
    small = [(e.lam, e.gamma) for e in rep.entries if e.lam < thr]
    print(f"eps={eps:g}: {rep.count_below(thr)} below {thr:.3f}: "
          + ", ".join(f"{lam:.2e} (gamma {g:g})" for lam, g in small))
