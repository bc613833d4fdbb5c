"""Smoke test for the capwhitham Python bindings.

Solves a small gravity wave, proves its existence, writes and re-checks the
certificate, and exercises the radii check and interval arithmetic.
"""

import os
import tempfile

import capwhitham_py as cw


def main():
    x = cw.Interval(0.1) + cw.Interval(0.2)
    assert x.contains(0.30000000000000004) and x.lo <= 0.3 <= x.hi

    cw.check_radii(5.24e-9, 0.078, 1990.0, 5.72e-9)
    try:
        cw.check_radii(1.0, 0.9, 1.0, 0.05)
    except cw.ProofError:
        pass
    else:
        raise AssertionError("radii check accepted an impossible polynomial")

    sol = cw.solve(0.0, 1.1, 30.0, 300)
    print(f"solve: {sol.iterations} iterations, residual {sol.residual:.2e}")
    proof = cw.prove_existence(sol.t, sol.c, sol.d, sol.coeffs, 0.45)
    print(f"existence: Y0 <= {proof.y0.hi:.3e}, Z1 <= {proof.z1.hi:.4f}, r = {proof.r:.3e}, eps = {proof.epsilon:.3f}")
    assert proof.r < 1e-4 and proof.epsilon > 0.3

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "cert.json")
        proof.emit(path)
        assert cw.recheck(path) == proof.r
    print("smoke: ok")


if __name__ == "__main__":
    main()
