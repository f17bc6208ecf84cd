"""Smoke test for the `affsurf` extension module.

Build and install first:  maturin build --release -o dist -m crates/python/Cargo.toml && pip install dist/affsurf-*.whl
"""

import math

import affsurf


def main():
    assert "L2" in affsurf.models()

    nf = affsurf.classify("B", [-1, 0, 0, -1, -1, 0])
    assert nf.verdict == "L2" and nf.witness == "identity", nf
    nf = affsurf.classify("A", ["-1", "0", "-1/2", "0", "0", "0"])
    assert nf.verdict == "S1" and nf.matrix is not None and nf.residual < 1e-9, nf

    l2 = affsurf.Model("L2")
    assert l2.is_locally_symmetric() and not l2.is_flat()
    assert l2.ricci_at(1.0, 0.0) == [[-1.0, 0.0], [0.0, 1.0]]

    traj = affsurf.integrate_geodesic("L2", (1.0, 0.0), (0.0, 1.0), (0.0, 3.0))
    lam, c, beta = traj.invariants
    assert abs(lam - 1) < 1e-9 and abs(c - 1) < 1e-9 and abs(beta) < 1e-9
    assert abs(traj.stop_times[1] - math.pi / 2) < 1e-6, traj.stop_times
    assert traj.to_csv().startswith("t,x1,x2,v1,v2\n")

    cov = affsurf.exp_coverage("L2", (1.0, 0.0), [0, 4, -4, 4], cells=20, angles=256)
    assert cov.count(0) > 0 and cov.count(1) > 0
    assert not affsurf.l2_reachable((1.0, 0.0), (1.0, 3.0))
    assert affsurf.l2_reachable((1.0, 0.0), (2.0, 0.5))

    q = affsurf.pseudosphere_geodesic([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0)
    assert abs(q[0] ** 2 + q[1] ** 2 - q[2] ** 2 - 1) < 1e-12, q

    defect, rows = affsurf.verify_isometry("TS2", grid=11)
    assert defect < 1e-8 and len(rows) == 121
    assert affsurf.spray_normal_form("L2", grid=11) < 1e-8
    metric_defect, crossings, _, _ = affsurf.spine_spray("vertical")
    assert metric_defect < 1e-8 and crossings == 0

    print("affsurf smoke test: ok")


if __name__ == "__main__":
    main()
