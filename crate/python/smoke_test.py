"""Smoke test for the Python bindings.

Build and install first, e.g. ``maturin develop -m crates/python/Cargo.toml``.
"""

import math

import generic_integrators_py as gi


def main():
    params = gi.SystemParams(mass=1.0, gamma=0.01, temperature=1.0)
    spring = gi.Potential.harmonic(1.0)
    x0 = gi.State(1.0, 0.0, 0.0)

    assert set(gi.methods()) == {"verlet", "ybaby", "mybaby", "rk3", "adg"}
    assert gi.total_energy(x0, params, spring) == 0.5

    traj = gi.integrate("ybaby", x0, 0.1, 5000, params, spring)
    assert len(traj) == 5001
    assert traj.entropy_decreases() == 0
    energy = traj.energies(params, spring)
    assert max(abs(e - 0.5) for e in energy) < 0.01

    exact = [gi.dho_exact(t, x0, params).s for t in traj.times()]
    err = gi.rmse(traj.entropies()[1:], exact[1:])
    assert 0 < err < 2e-3, err

    adg = gi.integrate("adg", x0, 0.5, 1000, params, spring)
    assert max(abs(e - 0.5) for e in adg.energies(params, spring)) < 1e-10

    slope = traj.dissipation_slope("q")
    assert abs(slope + params.gamma / 2) < 1e-3, slope

    jac = gi.one_step_jacobian("ybaby", x0, 0.1, params, spring)
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
    assert abs(det - math.exp(-params.gamma * 0.1)) < 1e-8

    points = [(h, 3.0 * h**2) for h in (0.1, 0.2, 0.4)]
    assert abs(gi.convergence_order(points) - 2.0) < 1e-12

    pendulum = gi.Potential("cosine")
    try:
        gi.step("adg", x0, 0.1, params, pendulum)
    except ValueError as e:
        assert "adg" in str(e)
    else:
        raise AssertionError("adg accepted a nonlinear force")
    try:
        gi.SystemParams(gamma=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative damping accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
