"""Smoke test for the `unicrit` extension module.

Uses an installed `unicrit` if there is one, otherwise the library built by
`cargo build -p unicrit-py --features extension-module` (debug or release).
"""

import cmath
import math
import os
import shutil
import sys
import tempfile


def load():
    try:
        import unicrit

        return unicrit
    except ImportError:
        pass
    root = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", ".."))
    for profile in ("release", "debug"):
        lib = os.path.join(root, "target", profile, "libunicrit.so")
        if os.path.exists(lib):
            tmp = tempfile.mkdtemp()
            shutil.copy(lib, os.path.join(tmp, "unicrit.so"))
            sys.path.insert(0, tmp)
            import unicrit

            return unicrit
    sys.exit("unicrit is not built; run cargo build -p unicrit-py --features extension-module")


def main():
    u = load()

    assert u.nu(2, 3) == 6
    assert u.mobius(6) == 1
    assert u.critical_orbit_poly(2, 3) == [0, 1, 1, 2, 1]
    assert u.pstar_at_zero(2, 2) == [1, 1]
    assert u.fn_is_squarefree(2, 4)

    roots = u.superattracting_parameters(2, 3)
    assert len(roots) == 4
    assert any(abs(z + 1.754877666246693) < 1e-12 for z in roots)
    assert all(u.green_parameter(2, z) == 0.0 for z in roots)
    assert [abs(z + 1) < 1e-12 for z in u.pstar_zero_roots(2, 2)] == [True]

    lam = complex(3, 1)
    assert abs(u.green_parameter(2, lam) - u.green_dynamical(2, lam, lam)) < 1e-12
    assert abs(u.h_parameter(2, None)) < 1e-12
    assert u.lyapunov(2, -1) >= math.log(2) - 1e-12
    assert abs(u.h1_inradius(2) - 0.25) < 1e-9
    assert u.in_h1(2, 0.1j) and not u.in_h1(2, -1)

    # averaged multiplier potential against a direct θ-average
    lam, r, m = complex(-0.1, 0.65), 0.5, 1 << 12
    direct = sum(u.log_pstar(2, lam, 3, r * cmath.exp(2j * math.pi * k / m)) for k in range(m)) / m
    assert abs(direct - u.averaged_log_pstar(2, lam, 3, r)) < 1e-8

    grid = u.SphereGrid(64, 64)
    assert len(grid) == 4096
    assert abs(grid.integrate([1.0] * len(grid)) - 1.0) < 1e-12
    bump = u.TestFunction("bump(0,0.5)")
    assert bump(0j) == 1.0 and abs(bump() - math.exp(-4)) < 1e-15
    assert len(u.TestFunction.builtin_family()) == 8

    report = u.theorem1(2, 3, phis=["one", "bump(-1,0.4)"], grid=(96, 96), cbf_samples=20, cbf_sphere_nodes=256)
    assert len(report) == 3 * 3
    assert all(row.status == "ok" for row in report.rows), report.rows
    assert report.to_csv().splitlines()[1].startswith("d,n,phi,discrepancy,bound")
    assert report.constants.safety_factor == 1.5

    report = u.theorem2(2, [2], radii=[1.0], phis=["sz"], grid=(96, 96), cbf_samples=20, cbf_sphere_nodes=256)
    assert [row.phi for row in report.rows] == ["sz;w=0", "L1;w=0", "sz;r=1", "L1;r=1"]

    try:
        u.superattracting_parameters(1, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("d = 1 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
