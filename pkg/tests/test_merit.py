"""Merit function values, derivatives, and structural properties."""

import math

import numpy as np
import pytest
from helpers import central_gradient, central_jacobian, random_homogeneous, random_primal_dual

from lpmerit import (
    HomogeneousPoint,
    InvalidConfig,
    KindMismatch,
    MeritKind,
    MeritSpec,
    PrimalDualPoint,
    StandardFormLp,
    eval_gradient,
    eval_hessian,
    eval_value,
    generate_optimal_lp,
)

BASE3 = MeritSpec(MeritKind.BASE, q=3.0)


@pytest.fixture
def desk_lp():
    return StandardFormLp([[1.0]], [1.0], [1.0], allow_square=True)


class TestDeskValues:
    def test_zero_at_the_optimal_point(self, desk_lp):
        assert eval_value(BASE3, desk_lp, PrimalDualPoint([1.0], [1.0], [0.0])) == 0.0

    def test_value_at_origin(self, desk_lp):
        # gamma = 0, rho = 1, sigma = 1, no penalty
        assert eval_value(BASE3, desk_lp, PrimalDualPoint.zeros(1, 1)) == 1.0

    def test_value_with_negative_x(self, desk_lp):
        # gamma = -1, rho = 2, sigma = 1, penalty (1/6)*1
        p = PrimalDualPoint([-1.0], [0.0], [0.0])
        assert eval_value(BASE3, desk_lp, p) == pytest.approx(19.0 / 6.0, rel=1e-15)

    def test_gradient_at_origin(self, desk_lp):
        g = eval_gradient(BASE3, desk_lp, PrimalDualPoint.zeros(1, 1))
        np.testing.assert_array_equal(g, [-1.0, -1.0, -1.0])

    def test_gradient_vanishes_at_the_optimum(self, desk_lp):
        g = eval_gradient(BASE3, desk_lp, PrimalDualPoint([1.0], [1.0], [0.0]))
        np.testing.assert_array_equal(g, [0.0, 0.0, 0.0])

    def test_desk_hessian_base(self, desk_lp):
        parts = eval_hessian(BASE3, desk_lp, PrimalDualPoint([1.0], [1.0], [0.0]))
        np.testing.assert_array_equal(
            parts.base, [[2.0, -1.0, 0.0], [-1.0, 2.0, 1.0], [0.0, 1.0, 1.0]]
        )
        np.testing.assert_array_equal(parts.diag_add, [0.0, 0.0, 0.0])
        # this 1x1 desk case is the m + n + 1 = full-rank corner
        assert np.linalg.matrix_rank(parts.full()) == 3

    def test_homogeneous_zero_point(self, desk_lp):
        spec = MeritSpec(MeritKind.HOMOGENEOUS, q=3.0)
        z = HomogeneousPoint([0.0], [0.0], [0.0], 0.0, 0.0)
        assert eval_value(spec, desk_lp, z) == 0.0
        np.testing.assert_array_equal(eval_gradient(spec, desk_lp, z), np.zeros(5))


def _spec_grid():
    specs = []
    for q in (2.1, 3.0):
        specs.append(MeritSpec(MeritKind.BASE, q=q))
        for nu in (0.0, 0.1):
            specs.append(MeritSpec(MeritKind.HOMOTOPY, q=q, nu=nu))
        specs.append(MeritSpec(MeritKind.HOMOGENEOUS, q=q))
    return specs


@pytest.mark.parametrize("spec", _spec_grid(), ids=lambda s: f"{s.kind.value}-q{s.q}-nu{s.nu}")
def test_gradient_matches_finite_differences(spec):
    prob = generate_optimal_lp(3, 5, 42)
    rng = np.random.default_rng(7)
    dim = 2 * 5 + 3 + (2 if spec.kind is MeritKind.HOMOGENEOUS else 0)
    for _ in range(5):
        z = rng.standard_normal(dim)
        point = _point_for(spec, z)
        g = eval_gradient(spec, prob.lp, point)
        g_fd = central_gradient(lambda zz: eval_value(spec, prob.lp, _point_for(spec, zz)), z)
        err = np.abs(g - g_fd).max() / (1.0 + np.abs(g).max())
        assert err <= 1e-5


@pytest.mark.parametrize("spec", _spec_grid(), ids=lambda s: f"{s.kind.value}-q{s.q}-nu{s.nu}")
def test_hessian_matches_finite_differences(spec):
    prob = generate_optimal_lp(3, 5, 43)
    rng = np.random.default_rng(8)
    dim = 2 * 5 + 3 + (2 if spec.kind is MeritKind.HOMOGENEOUS else 0)
    for _ in range(3):
        z = rng.standard_normal(dim)
        full = eval_hessian(spec, prob.lp, _point_for(spec, z)).full()
        fd = central_jacobian(
            lambda zz: eval_gradient(spec, prob.lp, _point_for(spec, zz)), z
        )
        tol = 1e-4 * (1.0 + np.linalg.norm(full, "fro"))
        assert np.abs(full - fd).max() <= tol


def _point_for(spec, z):
    n, m = 5, 3
    if spec.kind is MeritKind.HOMOGENEOUS:
        return HomogeneousPoint.from_vector(z, n, m)
    return PrimalDualPoint.from_vector(z, n, m)


class TestInvariants:
    def test_nonnegative_everywhere(self):
        prob = generate_optimal_lp(4, 7, 1)
        rng = np.random.default_rng(2)
        for spec in _spec_grid():
            for _ in range(20):
                if spec.kind is MeritKind.HOMOGENEOUS:
                    point = random_homogeneous(rng, 7, 4, scale=3.0)
                else:
                    point = random_primal_dual(rng, 7, 4, scale=3.0)
                assert eval_value(spec, prob.lp, point) >= 0.0

    def test_zero_at_generated_optimum(self):
        for seed in range(10):
            prob = generate_optimal_lp(4, 9, seed)
            s2 = prob.lp.scale**2
            assert eval_value(BASE3, prob.lp, prob.known_optimum) <= 1e-20 * s2
            g = eval_gradient(BASE3, prob.lp, prob.known_optimum)
            assert np.abs(g).max() <= 1e-12 * s2

    def test_midpoint_convexity_sampled(self):
        prob = generate_optimal_lp(3, 6, 4)
        rng = np.random.default_rng(5)
        for _ in range(100):
            u = rng.standard_normal(15) * 2.0
            v = rng.standard_normal(15) * 2.0
            fu = eval_value(BASE3, prob.lp, PrimalDualPoint.from_vector(u, 6, 3))
            fv = eval_value(BASE3, prob.lp, PrimalDualPoint.from_vector(v, 6, 3))
            fm = eval_value(BASE3, prob.lp, PrimalDualPoint.from_vector((u + v) / 2.0, 6, 3))
            assert fm <= 0.5 * fu + 0.5 * fv + 1e-10 * (1.0 + abs(fu) + abs(fv))

    def test_full_hessian_positive_semidefinite(self):
        prob = generate_optimal_lp(4, 8, 6)
        rng = np.random.default_rng(9)
        for _ in range(10):
            point = random_primal_dual(rng, 8, 4, scale=2.0)
            full = eval_hessian(BASE3, prob.lp, point).full()
            lam_min = np.linalg.eigvalsh(full)[0]
            assert lam_min >= -1e-8 * np.linalg.norm(full, 2)

    def test_full_hessian_is_singular_on_the_nonnegative_orthant(self):
        """At x, s >= 0 the penalty diagonal vanishes, so the Hessian equals
        the base block whose rank m + n + 1 = 4 falls short of 2n + m = 5."""
        lp = StandardFormLp([[1.0, 1.0]], [1.0], [1.0, 0.0])
        full = eval_hessian(BASE3, lp, PrimalDualPoint([0.3, 0.7], [-0.2], [0.5, 0.0])).full()
        svals = np.linalg.svd(full, compute_uv=False)
        assert int((svals > 1e-10 * svals[0]).sum()) <= 4

    @pytest.mark.parametrize("m,n", [(3, 6), (10, 30)])
    def test_base_matrix_rank_bound(self, m, n):
        """The iterate-independent block has numerical rank at most m + n + 1."""
        for seed in range(5):
            prob = generate_optimal_lp(m, n, seed)
            H = eval_hessian(BASE3, prob.lp, PrimalDualPoint.zeros(n, m)).base
            svals = np.linalg.svd(H, compute_uv=False)
            rank = int((svals > 1e-10 * svals[0]).sum())
            assert rank <= m + n + 1

    def test_hessian_is_one_lipschitz_for_q3(self):
        prob = generate_optimal_lp(5, 8, 10)
        rng = np.random.default_rng(11)
        for _ in range(100):
            u = random_primal_dual(rng, 8, 5, scale=2.0)
            v = random_primal_dual(rng, 8, 5, scale=2.0)
            Hu = eval_hessian(BASE3, prob.lp, u).full()
            Hv = eval_hessian(BASE3, prob.lp, v).full()
            dist = np.linalg.norm(u.as_vector() - v.as_vector())
            assert np.linalg.norm(Hu - Hv, "fro") <= dist + 1e-12

    def test_homotopy_hessian_positive_definite_off_boundary(self):
        prob = generate_optimal_lp(3, 6, 12)
        spec = MeritSpec(MeritKind.HOMOTOPY, q=2.1, nu=0.5)
        rng = np.random.default_rng(13)
        for _ in range(10):
            z = rng.standard_normal(15)
            z[np.abs(z) < 0.1] = 0.1  # keep every x and s coordinate away from zero
            full = eval_hessian(spec, prob.lp, PrimalDualPoint.from_vector(z, 6, 3)).full()
            assert np.linalg.eigvalsh(full)[0] > 0.0

    def test_homotopy_at_nu_zero_equals_base(self):
        prob = generate_optimal_lp(3, 6, 14)
        base = MeritSpec(MeritKind.BASE, q=2.1)
        hom0 = MeritSpec(MeritKind.HOMOTOPY, q=2.1, nu=0.0)
        rng = np.random.default_rng(15)
        for _ in range(10):
            point = random_primal_dual(rng, 6, 3, scale=2.0)
            assert eval_value(hom0, prob.lp, point) == eval_value(base, prob.lp, point)
            np.testing.assert_array_equal(
                eval_gradient(hom0, prob.lp, point), eval_gradient(base, prob.lp, point)
            )
            np.testing.assert_array_equal(
                eval_hessian(hom0, prob.lp, point).diag_add,
                eval_hessian(base, prob.lp, point).diag_add,
            )


class TestGuards:
    def test_overflow_saturates_to_inf(self):
        lp = StandardFormLp([[1.0, 1.0]], [1.0], [1.0, 0.0])
        p = PrimalDualPoint([1e200, 0.0], [0.0], [0.0, 0.0])
        v = eval_value(BASE3, lp, p)
        assert v == math.inf

    def test_fractional_q_handles_negative_coordinates(self):
        lp = StandardFormLp([[1.0, 1.0]], [1.0], [1.0, 0.0])
        spec = MeritSpec(MeritKind.BASE, q=2.1)
        p = PrimalDualPoint([-0.5, 0.3], [0.2], [-0.1, 0.0])
        assert math.isfinite(eval_value(spec, lp, p))
        assert np.isfinite(eval_gradient(spec, lp, p)).all()
        assert np.isfinite(eval_hessian(spec, lp, p).diag_add).all()

    def test_q_must_exceed_two(self):
        with pytest.raises(InvalidConfig):
            MeritSpec(MeritKind.BASE, q=2.0)

    def test_negative_nu_rejected(self):
        with pytest.raises(InvalidConfig):
            MeritSpec(MeritKind.HOMOTOPY, q=3.0, nu=-0.1)

    def test_kind_mismatch(self):
        lp = StandardFormLp([[1.0, 1.0]], [1.0], [1.0, 0.0])
        hom = MeritSpec(MeritKind.HOMOGENEOUS, q=3.0)
        with pytest.raises(KindMismatch):
            eval_value(hom, lp, PrimalDualPoint.zeros(2, 1))
        with pytest.raises(KindMismatch):
            eval_value(BASE3, lp, HomogeneousPoint.ones(2, 1))


def test_base_matrices_are_symmetric():
    prob = generate_optimal_lp(4, 7, 18)
    p = PrimalDualPoint.zeros(7, 4)
    H = eval_hessian(BASE3, prob.lp, p).base
    np.testing.assert_array_equal(H, H.T)
    hp = HomogeneousPoint.ones(7, 4)
    Hh = eval_hessian(MeritSpec(MeritKind.HOMOGENEOUS, q=3.0), prob.lp, hp).base
    np.testing.assert_array_equal(Hh, Hh.T)


def test_hessian_base_is_cached_per_problem():
    prob = generate_optimal_lp(3, 6, 16)
    rng = np.random.default_rng(17)
    p1 = random_primal_dual(rng, 6, 3)
    p2 = random_primal_dual(rng, 6, 3)
    h1 = eval_hessian(BASE3, prob.lp, p1)
    h2 = eval_hessian(MeritSpec(MeritKind.HOMOTOPY, q=3.0, nu=0.2), prob.lp, p2)
    assert h1.base is h2.base
    assert not h1.base.flags.writeable
