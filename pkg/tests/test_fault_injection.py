"""A tampered Bessel kernel must be caught by the dual-solver check."""

import os
import subprocess
import sys
import textwrap

SCRIPT = textwrap.dedent("""
    import json
    import conespec.bessel as b
    from numba import njit

    original = b.jy

    @njit
    def tampered(nu, x):
        j, y, jp, yp, err = original(nu, x)
        return j, y * (1.0 + 1e-5), jp, yp, err

    # swap before the solver modules compile against the kernel
    b.jy = tampered
    from conespec.verification import check_dual_solver

    r = check_dual_solver()
    print(json.dumps({"passed": r.passed, "summary": r.summary}))
""")


def test_tampered_bessel_constant_fails_dual_solver(tmp_path):
    env = dict(os.environ, NUMBA_CACHE_DIR=str(tmp_path / "numba"))
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env,
                         timeout=600)
    assert res.returncode == 0, res.stderr
    import json

    out = json.loads(res.stdout.strip().splitlines()[-1])
    assert not out["passed"]
    assert "gamma=" in out["summary"] and "[" in out["summary"]
