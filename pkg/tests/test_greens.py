import math

import numpy as np
import pytest

from pspect.greens import apply_Gp, as_source, residual
from pspect.radial_ivp import Problem, shoot
from pspect.spectrum import find_eigenvalues
from pspect.weights import Weight


def test_laplace_closed_form():
    # p=2, N=1, h=1: u = (1 - r^2)/2
    prof = apply_Gp(2.0, 1, 1.0)
    rs = np.linspace(0, 1, 101)
    assert np.max(np.abs(prof(rs) - (1 - rs**2) / 2)) < 1e-12
    assert abs(prof.u[-1]) == 0.0
    assert prof.uprime[0] == 0.0


@pytest.mark.parametrize("p,n_dim", [(2.5, 3), (1.5, 2), (3.0, 1), (2.0, 3)])
def test_general_closed_form_constant_source(p, n_dim):
    # h=1: u = N^{-1/(p-1)} (1 - r^{p'})/p'
    pc = p / (p - 1.0)
    prof = apply_Gp(p, n_dim, 1.0)
    rs = np.linspace(0, 1, 101)
    exact = n_dim ** (-1.0 / (p - 1.0)) * (1 - rs**pc) / pc
    assert np.max(np.abs(prof(rs) - exact)) < 1e-10


def test_homogeneity():
    # G_p(c h) = c^{1/(p-1)} G_p(h)
    rng = np.random.default_rng(11)
    rs = np.linspace(0, 1, 101)
    for p in (1.5, 2.5):
        for _ in range(3):
            coeffs = rng.uniform(-1, 1, 4)
            c = float(rng.uniform(0.1, 30.0))
            h = Weight.poly(coeffs)
            u1 = apply_Gp(p, 2, h)(rs)
            u2 = apply_Gp(p, 2, h.scaled(c))(rs)
            scale = c ** (1.0 / (p - 1.0))
            ref = np.max(np.abs(scale * u1)) + 1e-300
            assert np.max(np.abs(u2 - scale * u1)) <= 1e-9 * ref


def test_monotonicity_in_source():
    h1 = Weight.poly([0.5, 0.2])
    h2 = Weight.poly([0.8, 0.4])
    rs = np.linspace(0, 1, 201)
    u1 = apply_Gp(2.5, 2, h1)(rs)
    u2 = apply_Gp(2.5, 2, h2)(rs)
    assert np.all(u2 >= u1 - 1e-10)


def test_agreement_with_shooting():
    # shoot the source problem with alpha matched to G_p(h)(0)
    p, n_dim = 2.5, 2
    h = Weight.poly([1.0, -2.0])
    prof = apply_Gp(p, n_dim, h)
    prob = Problem.source(p, n_dim, h.scalar_fn())
    traj = shoot(prob, prof.value0)
    rs = np.linspace(1e-5, 1.0, 300)
    u_shot, _ = traj.eval(rs)
    assert np.max(np.abs(u_shot - prof(rs))) < 1e-7


def test_eigenfunction_fixed_point():
    # h = mu_1 * m * phi_p(u_1) reproduces u_1 (the fixed-point property)
    p, n_dim = 2.0, 1
    m = Weight.poly([1.0, -2.0])
    res = find_eigenvalues(Problem.linear(p, n_dim, m, math.nan), 1, "+")
    mu1 = res.values[0]
    traj = res.eigenpairs[0].trajectory

    def source(r):
        r_arr = np.clip(np.asarray(r, float), traj.r[0], traj.r[-1])
        uu = traj.dense(r_arr)[0]
        return mu1 * m(np.asarray(r, float)) * np.sign(uu) * np.abs(uu) ** (p - 1)

    prof = apply_Gp(p, n_dim, source)
    rs = np.linspace(1e-5, 1.0, 257)
    u_eig, _ = traj.eval(rs)
    assert np.max(np.abs(u_eig - prof(rs))) <= 1e-6 * np.max(np.abs(u_eig))


def test_residual_exact_pair():
    res = residual(
        2.0, 1, 1.0,
        lambda r: (1 - np.asarray(r) ** 2) / 2,
        lambda r: -np.asarray(r),
    )
    assert res <= 1e-8


def test_residual_detects_perturbation():
    res = residual(
        2.0, 1, 1.0,
        lambda r: (1 - np.asarray(r) ** 2) / 2 + 1e-3 * np.sin(np.pi * np.asarray(r)),
        lambda r: -np.asarray(r) + 1e-3 * np.pi * np.cos(np.pi * np.asarray(r)),
    )
    assert res > 1e-3


def test_residual_zero_pair():
    res = residual(
        2.5, 3, 0.0,
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    )
    assert res == 0.0


def test_residual_of_operator_output():
    h = Weight.poly([1.0, -2.0])  # sign-changing: exercises the kink grading
    for p, n_dim in ((2.5, 3), (1.5, 2)):
        prof = apply_Gp(p, n_dim, h)
        assert residual(p, n_dim, h, prof) <= 1e-7


def test_quadrature_error_reported_small():
    prof = apply_Gp(2.5, 2, Weight.poly([1.0, -2.0]))
    assert prof.quad_error < 1e-10


def test_source_normalization_forms():
    s1 = as_source(1.0)
    assert s1.value0() == 1.0
    s2 = as_source(lambda r: np.asarray(r) ** 2)
    assert abs(s2(np.array([0.5]))[0] - 0.25) < 1e-15
    rs = np.linspace(0, 1, 33)
    s3 = as_source((rs, rs**3))
    assert abs(s3(np.array([0.5]))[0] - 0.125) < 1e-3
    with pytest.raises(Exception):
        as_source(object())
