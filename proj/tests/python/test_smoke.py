"""Python binding smoke tests: exercises the main operations end to end."""
import math
import tempfile

import _nemel as nemel


def test_validate_leslie():
    c = nemel.LeslieCoefficients(0.0, -0.5, 0.5, 1.0, 0.5, 0.5)
    rep = nemel.validate_leslie(c)
    assert rep.satisfies_positivity
    assert rep.parodi_holds
    assert abs(rep.delta - 1.0) < 1e-14
    assert abs(rep.hp.mu_V - 1.0) < 1e-14

    bad = nemel.LeslieCoefficients(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert not nemel.validate_leslie(bad).satisfies_positivity


def test_constitutive_ops():
    eps = nemel.epsilon_tensor((1.0, 0.0), 1.0, 2.0)
    assert abs(eps[0] - 3.0) < 1e-15 and abs(eps[3] - 1.0) < 1e-15

    p = nemel.projector((0.0, 1.0))
    assert abs(p[0] - 1.0) < 1e-15 and abs(p[3]) < 1e-15

    c = nemel.LeslieCoefficients(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    s = nemel.leslie_stress(c, (0.0, 0.0, 0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    assert abs(s[2] - 1.0) < 1e-15  # yx entry

    q = nemel.dissipation_quadratic_form(
        nemel.LeslieCoefficients(0.0, -0.5, 0.5, 1.0, 0.5, 0.5),
        (1.0, 0.0), (0.0, 1.0, 1.0, 0.0), (1.0, 0.0))
    assert abs(q - 2.0) < 1e-14


def test_poisson_manufactured():
    import numpy as np
    n = 32
    g = nemel.Grid(n, n)
    x = (np.arange(n) + 0.5) * g.hx
    y = (np.arange(n) + 0.5) * g.hy
    X, Y = np.meshgrid(x, y)
    exact = np.sin(math.pi * X) * np.sin(math.pi * Y)
    rho = 2.0 * math.pi ** 2 * exact
    d1 = np.ones_like(rho)
    d2 = np.zeros_like(rho)
    phi = nemel.solve_poisson(g, rho, d1, d2, eps_perp=1.0, eps_a=0.0, tol=1e-12)
    assert np.max(np.abs(phi - exact)) < 5e-3


def test_poisson_boltzmann_symmetric():
    import numpy as np
    g = nemel.Grid(24, 24)
    phi = nemel.solve_poisson_boltzmann(g, [1.0, -1.0], [0.5, 0.5], tol=1e-12)
    assert np.max(np.abs(phi)) < 1e-10


def test_smoke_run():
    with tempfile.TemporaryDirectory() as tmp:
        summary = nemel.run_smoke(n=16, out_dir=tmp, max_steps=20)
        assert summary.steps == 20
        assert summary.max_mass_drift < 1e-12
        assert summary.min_c > 0.0


if __name__ == "__main__":
    test_validate_leslie()
    test_constitutive_ops()
    test_poisson_manufactured()
    test_poisson_boltzmann_symmetric()
    test_smoke_run()
    print("python smoke tests passed")
