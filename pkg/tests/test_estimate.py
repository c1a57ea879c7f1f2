import math

import numpy as np
import pytest

from sigma2est import estimate, minval, symfun
from sigma2est.estimate import PointData
from sigma2est.minval import ProblemClass
from conftest import kkt_exact


def pd3(lam=(1, 1, 1), h111=1.0, support=1.0, varphi=3.0, grad=(0, 0, 0), alpha=1.0, tangent=None):
    n = len(lam)
    tangent = np.zeros(n) if tangent is None else tangent
    return PointData(n=n, lam=lam, h111=h111, support=support, tangent=tangent,
                     varphi=varphi, varphi_grad=grad, alpha=alpha)


# --- PointData ---------------------------------------------------------------


def test_pointdata_reorders_largest_first():
    pd = pd3(lam=(1, 3, 2), grad=(10, 30, 20), tangent=(0.1, 0.3, 0.2))
    np.testing.assert_array_equal(pd.lam, [3, 1, 2])
    np.testing.assert_array_equal(pd.varphi_grad, [30, 10, 20])
    np.testing.assert_array_equal(pd.tangent, [0.3, 0.1, 0.2])


@pytest.mark.parametrize(
    "kw",
    [dict(lam=(1, 1, -0.5)), dict(support=0.0), dict(varphi=-1.0), dict(grad=(0, 0))],
)
def test_pointdata_validation(kw):
    with pytest.raises(ValueError):
        pd3(**kw)


def test_pointdata_round_trip():
    pd = pd3(lam=(2, 1, 1), grad=(7, 0, 0), alpha=0.5, tangent=(0.1, 0.2, 0.3))
    assert PointData.from_dict(pd.to_dict()).to_dict() == pd.to_dict()


# --- building the pointwise problem --------------------------------------


def test_build_point_problem_examples():
    p = estimate.build_point_problem(pd3())
    assert (p.n, p.b, p.cap_c) == (2, 1.0, -1.0)
    np.testing.assert_array_equal(p.a, [2, 2])

    p = estimate.build_point_problem(pd3(h111=0.0))
    assert (p.b, p.cap_c) == (0.0, 0.0)

    p = estimate.build_point_problem(pd3(lam=(2, 1, 1), h111=0.0, grad=(7, 0, 0), alpha=0.0, varphi=5.0))
    assert p.cap_c == -7.0


def test_build_point_problem_needs_three_dims():
    with pytest.raises(ValueError):
        estimate.build_point_problem(pd3(lam=(1, 1), varphi=1.0, grad=(0, 0)))


def test_derivative_constant_forms_agree_at_critical_points(rng):
    for _ in range(300):
        n = int(rng.integers(3, 9))
        lam = estimate.sample_gamma_k(rng, n, 2, max_first_entry=False)
        pd = PointData.critical(lam, rng.uniform(0.2, 3), rng.standard_normal(n),
                                rng.standard_normal(n), rng.uniform(-3, 2))
        direct = estimate.derivative_constant(pd, substituted=False)
        subst = estimate.derivative_constant(pd, substituted=True)
        scale = 1 + abs(direct) + abs(pd.h111) * np.abs(pd.lam).sum() + abs(pd.varphi_grad[0]) * pd.support ** pd.alpha
        assert abs(direct - subst) <= 1e-10 * scale


# --- identities -------------------------------------------------------------


def test_identity_check_values():
    r1, r2 = estimate.identity_checks([1, 1, 1])
    assert r1 == 0 and r2 == 0
    # hand expansions for (2,1,1): a = (3, 3); 36 - 18 = 18 = 2*4 + 2*5
    a = np.array([3.0, 3.0])
    assert a.sum() ** 2 - a @ a == 18 == 2 * 4 + 2 * symfun.sigma(2, [2, 1, 1])
    assert estimate.identity_checks([2, 1, 1]) == (0, 0)
    assert estimate.identity_checks([1, 0, 0]) == (0, 0)


def test_identity_checks_arbitrary_lambda(rng):
    from sigma2est import checks

    lam = rng.uniform(-5, 5, (500, 7))
    r1, r2 = estimate.identity_checks(lam)
    assert r1.shape == r2.shape == (500,)
    for row in lam:
        assert max(checks.sum_identity_residuals(row)) <= 1e-10


def test_identity_positivity_on_gamma2(rng):
    for _ in range(1000):
        n = int(rng.integers(3, 11))
        lam = estimate.sample_gamma_k(rng, n, 2)
        s1 = (n - 2) * lam.sum() + lam[0]
        s2 = (n - 1) * lam[0] ** 2 + 2 * (n - 2) * symfun.sigma(2, lam)
        assert s1 > 0 and s2 > 0


@pytest.mark.parametrize(
    "lam, alpha, expected", [((1, 1, 1), 1.0, -9.0), ((1, 1, 1), 0.0, 12.0), ((2, 1, 1), 1.0, -25.0)]
)
def test_coefficient_identity_examples(lam, alpha, expected):
    lhs, rhs = estimate._coeff_sides(np.array(lam, dtype=float), alpha)
    assert lhs == expected and rhs == expected
    assert estimate.coeff_identity_residual(lam, alpha) == 0


def test_coefficient_identity_random(rng):
    from sigma2est import checks

    for _ in range(500):
        lam = estimate.sample_gamma_k(rng, int(rng.integers(3, 11)), 2)
        assert checks.coeff_identity_scaled(lam, rng.uniform(-3, 2)) <= 1e-10


# --- pointwise minimum -------------------------------------------------------


def test_point_minimum_examples():
    assert estimate.sigma2_point_minimum(pd3(h111=0.0)) == 0.0
    assert estimate.sigma2_point_minimum(pd3(alpha=0.0)) == pytest.approx(0.75, abs=1e-15)
    assert estimate.sigma2_point_minimum(pd3()) == pytest.approx(-9 / 16, abs=1e-15)
    # exact elimination of the induced problems
    assert kkt_exact(2, 1, 2, [2, 2])[0] * 4 == 3
    assert kkt_exact(2, 1, -1, [2, 2])[0] * 16 == -9


def test_point_minimum_equals_closed_form(rng):
    for _ in range(500):
        n = int(rng.integers(3, 11))
        lam = estimate.sample_gamma_k(rng, n, 2, max_first_entry=False)
        pd = PointData.critical(lam, rng.uniform(0.2, 3), rng.standard_normal(n),
                                rng.standard_normal(n), rng.uniform(-3, 2))
        ref = minval.min_value_closed_form(estimate.build_point_problem(pd))
        assert abs(estimate.sigma2_point_minimum(pd) - ref) <= 1e-10 * (1 + abs(ref))


# --- sigma_2 bound and explorer -------------------------------------------


@pytest.mark.parametrize(
    "lam, b, c, expected", [((1, 1, 1), 0, 0, 0.0), ((1, 1, 1), 1, 0, 0.75), ((2, 1, 1), 1, 1, 0.75)]
)
def test_sigma2_bound_examples(lam, b, c, expected):
    assert estimate.remark42_bound(lam, b, c) == pytest.approx(expected, abs=1e-15)
    p = estimate.sigma2_bound_problem(lam, b, c)
    assert float(kkt_exact(p.n, p.b, p.cap_c, p.a.tolist())[0]) == pytest.approx(expected, abs=1e-15)


def test_sigma2_bound_requires_gamma2():
    with pytest.raises(ValueError):
        estimate.remark42_bound([1, 1, -0.5], 1, 0)


def test_sigma2_bound_matches_closed_form(rng):
    from sigma2est import checks

    for _ in range(500):
        lam = estimate.sample_gamma_k(rng, int(rng.integers(3, 11)), 2)
        b, c = rng.uniform(-10, 10, 2)
        assert checks.sigma2_bound_gap(lam, b, c) <= 1e-10
        assert checks.explore_k2_gap(lam, b, c) <= 1e-10


@pytest.mark.parametrize("b, expected", [(0.0, 0.0), (1.0, 4 / 3)])
def test_explore_k3_examples(b, expected):
    rec = estimate.explore_k([1, 1, 1, 1], 3, b, 0.0)
    assert rec.kind is ProblemClass.WELL_POSED
    assert rec.value == pytest.approx(expected, abs=1e-10)
    np.testing.assert_allclose(rec.x, np.full(3, -b / 3), atol=1e-12)


def test_explore_errors():
    with pytest.raises(ValueError):
        estimate.explore_k([1, 1, 1, 1], 5, 0, 0)
    with pytest.raises(ValueError):
        estimate.explore_k([1, 1, -0.9, 0.1], 3, 0, 0)


def test_explore_csv_row():
    rec = estimate.explore_k([1, 1, 1, 1], 3, 1.0, 0.0)
    head = rec.csv_header()
    assert head == ["n", "k", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "b", "C", "class", "value"]
    assert len(rec.csv_row()) == len(head)


def test_explore_sweep_is_seeded():
    a = estimate.explore_sweep(4, 3, 5, seed=3)
    b = estimate.explore_sweep(4, 3, 5, seed=3)
    assert [r.value for r in a] == [r.value for r in b]
    assert all(symfun.in_gamma_k(r.lam, 3) for r in a)


# --- final inequality --------------------------------------------------------


def test_final_bound_examples():
    q = estimate.final_bound(pd3(varphi=1.0, alpha=1.0), delta=1.0)
    assert (q.lead, q.h_bound) == (1.0, 0.0)

    q = estimate.final_bound(pd3(varphi=2.0, alpha=0.0), delta=1.0, lin=0.0, const=8.0)
    assert q.lead == 4.0
    assert q.h_bound == pytest.approx(math.sqrt(2), abs=1e-15)

    q = estimate.final_bound(pd3(varphi=1.0, alpha=1.5), delta=1.0)
    assert q.lead == 0.25


def test_final_bound_second_form_by_substitution():
    # A = (2 - alpha)(1 + delta - alpha) phi s^(alpha - 1) (s^2 + |t|^2)
    pd = pd3(varphi=0.7, alpha=1.2, support=0.9, tangent=(0.3, -0.4, 0.0))
    q = estimate.final_bound(pd, delta=0.5, lin=1.0, const=2.0)
    lead = 0.8 * 0.3 * 0.7 * 0.9 ** 0.2 * (0.81 + 0.25)
    assert q.lead == pytest.approx(lead, rel=1e-14)
    h = q.h_bound
    assert q.lead * h * h == pytest.approx(q.lin * h + q.const, rel=1e-12)


@pytest.mark.parametrize("alpha, delta", [(2.0, 1.0), (1.5, 0.5), (1.3, 0.2)])
def test_final_bound_rejects_alpha_out_of_range(alpha, delta):
    with pytest.raises(ValueError):
        estimate.final_bound(pd3(varphi=1.0, alpha=alpha), delta=delta)


def test_final_bound_negative_discriminant():
    q = estimate.final_bound(pd3(varphi=1.0, alpha=1.0), delta=1.0, lin=0.0, const=-1.0)
    assert q.h_bound == -math.inf
