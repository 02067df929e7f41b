import math

import pytest

import rwre


def percolation_spec():
    spec = rwre.ModelSpec()
    spec.name = "percolation"
    spec.d = 2
    spec.L = 16
    spec.p = 0.7
    return spec


def test_make_env_and_roundtrip():
    env = rwre.make_env(percolation_spec(), 7, 0)
    assert env.num_vertices > 0
    env.validate()
    back = rwre.loads(env.dumps())
    assert back.hash() == env.hash()
    assert back.num_vertices == env.num_vertices


def test_heat_kernel_and_propagate():
    spec = rwre.ModelSpec()
    spec.name = "lattice"
    spec.d = 1
    spec.L = 12
    env = rwre.make_env(spec, 1)
    assert rwre.heat_kernel(env, env.root, env.root, 0) == 1.0
    law = rwre.propagate(env, env.root, 6)
    assert abs(sum(law.values()) - 1.0) < 1e-12
    path = rwre.sample_path(env, env.root, 5, 42)
    assert len(path) == 6 and path[0] == env.root


def test_entropy_and_delta():
    uniform = {i: 0.25 for i in range(4)}
    assert rwre.entropy(uniform) == pytest.approx(math.log(4.0))
    assert rwre.delta({0: 1.0}, {1: 1.0}) == pytest.approx(math.sqrt(2.0))
    env = rwre.make_env(percolation_spec(), 7, 0)
    # laws at times n and n-1 from the same point have disjoint parity support
    assert rwre.delta_n(env, env.root, env.root, 3) == pytest.approx(math.sqrt(2.0))


def test_displacement_is_diffusive_on_z():
    spec = rwre.ModelSpec()
    spec.name = "lattice"
    spec.d = 1
    spec.L = 16
    rows = rwre.displacement_profile(spec, 10, 1, 3)
    for n, mean_d2, _ in rows:
        assert mean_d2 == pytest.approx(float(n), abs=1e-10)


def test_harmonic_helpers():
    spec = rwre.ModelSpec()
    spec.name = "lattice"
    spec.d = 2
    spec.L = 16
    env = rwre.make_env(spec, 1)
    assert rwre.poincare_constant(env, env.root, 4) > 0
    radii, sup = rwre.corrector_profile(env, [1.0, 0.0], 8)
    assert radii and len(radii) == len(sup)
    assert max(sup) <= 1e-8


def test_budget_error():
    spec = rwre.ModelSpec()
    spec.name = "lattice"
    spec.d = 1
    spec.L = 8
    env = rwre.make_env(spec, 1)
    with pytest.raises(rwre.BudgetError):
        rwre.propagate(env, env.root, 10**6)
