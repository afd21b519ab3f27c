import numpy as np
import numpy.testing as npt
import pytest

from setlearn import (Abel, KpcaTruncation, Landweber, NumericError,
                      SpectralCutoff, Tikhonov, UsageError, decompose,
                      format_filter, gram, parse_filter)
from setlearn.filters import (EIG_SLACK, apply_g, apply_r, g_value,
                              lipschitz_constant, r_value)

LIPSCHITZ_FAMILIES = [Tikhonov(0.1), SpectralCutoff(0.1), Landweber(9)]


def test_tikhonov_r_and_g():
    f = Tikhonov(0.1)
    assert r_value(f, 0.1) == 0.5
    assert g_value(f, 0.1) == 5.0


def test_landweber_r_closed_form():
    assert r_value(Landweber(1), 0.5) == 0.75
    # closed form agrees with the truncated geometric sum it abbreviates
    m, s = 7, 0.3
    series = s * sum((1 - s) ** k for k in range(m + 1))
    npt.assert_allclose(r_value(Landweber(m), s), series, rtol=1e-14)


def test_r_vanishes_at_zero():
    for f in (Tikhonov(0.2), SpectralCutoff(0.3), Landweber(5),
              KpcaTruncation(lam=0.4)):
        assert r_value(f, 0.0) == 0.0


def test_cutoff_g_branches():
    f = SpectralCutoff(0.5)
    assert g_value(f, 0.25) == 2.0   # 1/lambda below the cut
    assert g_value(f, 0.8) == 1.25   # 1/sigma above


def test_landweber_m0_g_is_one():
    f = Landweber(0)
    for s in (0.0, 0.3, 1.0):
        assert g_value(f, s) == 1.0


def test_g_at_zero():
    assert g_value(Tikhonov(0.25), 0.0) == 4.0
    assert g_value(SpectralCutoff(0.25), 0.0) == 4.0
    assert g_value(Landweber(9), 0.0) == 10.0
    assert g_value(KpcaTruncation(lam=0.25), 0.0) == 0.0


def test_lipschitz_constants():
    npt.assert_allclose(lipschitz_constant(Tikhonov(0.01)), 100.0)
    npt.assert_allclose(lipschitz_constant(SpectralCutoff(0.02)), 50.0)
    assert lipschitz_constant(KpcaTruncation(lam=0.1)) is None


def test_landweber_lipschitz_matches_numeric_derivative_sup():
    # independent oracle: maximize |dr/ds| of 1-(1-s)^(m+1) on a fine grid
    m = 9
    s = np.linspace(0.0, 1.0, 200001)
    r = 1.0 - (1.0 - s) ** (m + 1)
    slope = np.max(np.abs(np.diff(r) / np.diff(s)))
    assert lipschitz_constant(Landweber(m)) == m + 1
    assert slope <= m + 1 + 1e-6
    npt.assert_allclose(slope, m + 1, rtol=1e-4)


def test_cutoff_tie_at_lambda():
    f = SpectralCutoff(0.5)
    assert r_value(f, 0.5) == 1.0
    assert g_value(f, 0.5) == 2.0


def test_kpca_includes_sigma_equal_lambda():
    f = KpcaTruncation(lam=0.5)
    assert r_value(f, 0.5) == 1.0
    assert g_value(f, 0.5) == 2.0
    assert r_value(f, 0.4999) == 0.0
    assert g_value(f, 0.4999) == 0.0


def test_r_range_random_draws():
    rng = np.random.default_rng(19)
    s = rng.uniform(0.0, 1.0, 2000)
    for f in (Tikhonov(1e-3), SpectralCutoff(1e-2), Landweber(200),
              KpcaTruncation(lam=0.3)):
        r = r_value(f, s)
        assert np.all(r >= 0.0) and np.all(r <= 1.0)


def test_r_sigma_g_consistency():
    rng = np.random.default_rng(21)
    s = rng.uniform(1e-6, 1.0, 1000)
    for f in (Tikhonov(0.05), SpectralCutoff(0.2), Landweber(30),
              KpcaTruncation(lam=0.1)):
        r = r_value(f, s)
        sg = s * g_value(f, s)
        assert np.all(np.abs(r - sg) <= 4 * np.spacing(np.maximum(r, 1e-300)))


def test_pointwise_limit_in_lambda():
    # for fixed sigma the deficit 1 - r is bounded by the analytic rate of
    # each family and shrinks along the lambda schedule
    sigma = 0.3
    lams = [10.0 ** -k for k in range(1, 9)]
    prev = np.inf
    for lam in lams:
        deficit = 1.0 - r_value(Tikhonov(lam), sigma)
        assert deficit <= lam / sigma
        assert deficit <= prev
        prev = deficit
    for lam in lams:
        if lam < sigma:
            assert r_value(SpectralCutoff(lam), sigma) == 1.0
    prev = np.inf
    for lam in lams[:5]:
        m = int(round(1.0 / lam)) - 1
        deficit = 1.0 - r_value(Landweber(m), sigma)
        assert deficit <= (1.0 - sigma) ** (m + 1) + 1e-15
        assert deficit <= prev
        prev = deficit


def test_lipschitz_bound_random_pairs():
    rng = np.random.default_rng(23)
    a = rng.uniform(0.0, 1.0, 500)
    b = rng.uniform(0.0, 1.0, 500)
    for f in LIPSCHITZ_FAMILIES:
        L = lipschitz_constant(f)
        lhs = np.abs(r_value(f, a) - r_value(f, b))
        assert np.all(lhs <= L * np.abs(a - b) * (1 + 1e-10) + 1e-15)


def test_sigma_domain_check():
    with pytest.raises(UsageError):
        r_value(Tikhonov(0.1), 1.5)
    with pytest.raises(UsageError):
        r_value(Tikhonov(0.1), -0.5)
    # round-off overshoot within the slack is clipped, not rejected
    assert r_value(SpectralCutoff(0.5), 1.0 + 0.5 * EIG_SLACK) == 1.0
    assert r_value(Tikhonov(0.1), -0.5 * EIG_SLACK) == 0.0


def test_parameter_validation():
    for bad in (0.0, -1.0, np.nan, np.inf):
        with pytest.raises(UsageError):
            Tikhonov(bad)
        with pytest.raises(UsageError):
            SpectralCutoff(bad)
    with pytest.raises(UsageError):
        Landweber(-1)
    with pytest.raises(UsageError):
        Landweber(2.5)
    with pytest.raises(UsageError):
        KpcaTruncation()
    with pytest.raises(UsageError):
        KpcaTruncation(lam=0.1, components=2)
    with pytest.raises(UsageError):
        KpcaTruncation(components=0)
    assert Landweber(0).iterations == 0


def test_decompose_single_entry():
    D = decompose(gram(Abel(1.0), [[0.0]]))
    npt.assert_allclose(D.eigenvalues, [1.0])
    npt.assert_allclose(np.abs(D.eigenvectors), [[1.0]])


def test_decompose_two_by_two_closed_form():
    c = 0.5
    G = gram(Abel(1.0), [[0.0], [np.log(2.0)]])  # K12 = 1/2
    npt.assert_allclose(G.entries[0, 1], c, rtol=1e-15)
    D = decompose(G)
    npt.assert_allclose(D.eigenvalues, [(1 + c) / 2, (1 - c) / 2], rtol=1e-14)


def test_decompose_reconstruction_and_trace():
    rng = np.random.default_rng(29)
    X = rng.normal(size=(6, 2))
    G = gram(Abel(1.0), X)
    D = decompose(G)
    A = G.entries / 6
    R = (D.eigenvectors * D.eigenvalues) @ D.eigenvectors.T
    err = np.linalg.norm(R - A) / np.linalg.norm(A)
    assert err <= 6 * 1e-12
    npt.assert_allclose(D.eigenvalues.sum(), 1.0, atol=1e-12)
    assert np.all(np.diff(D.eigenvalues) <= 0)
    assert np.all(D.eigenvalues >= 0.0) and np.all(D.eigenvalues <= 1.0)
    npt.assert_allclose(D.eigenvectors.T @ D.eigenvectors, np.eye(6), atol=1e-12)


def test_decompose_rejects_out_of_range_spectrum():
    from setlearn import GramMatrix
    bad = GramMatrix(np.array([[4.0, 0.0], [0.0, 1.0]]))  # eigenvalue 2 of G/2
    with pytest.raises(NumericError):
        decompose(bad)


def test_apply_r_cutoff_is_projection():
    rng = np.random.default_rng(31)
    X = rng.normal(size=(8, 2))
    D = decompose(gram(Abel(1.0), X))
    lam = 0.5 * D.eigenvalues[D.eigenvalues > 1e-12].min()
    P = apply_r(SpectralCutoff(lam), D)
    npt.assert_allclose(P @ P, P, atol=1e-10)
    npt.assert_allclose(P, P.T, atol=1e-14)


def test_apply_r_tikhonov_scalar():
    D = decompose(gram(Abel(1.0), [[0.0]]))
    lam = 0.3
    out = apply_r(Tikhonov(lam), D)
    npt.assert_allclose(out, [[1.0 / (1.0 + lam)]], rtol=1e-14)


def test_apply_r_landweber_matches_matrix_polynomial():
    # oracle: I - (I - A)^(m+1) evaluated directly as a matrix power
    rng = np.random.default_rng(37)
    X = rng.normal(size=(4, 2))
    G = gram(Abel(1.0), X)
    A = G.entries / 4
    m = 6
    D = decompose(G)
    P = np.eye(4) - np.linalg.matrix_power(np.eye(4) - A, m + 1)
    npt.assert_allclose(apply_r(Landweber(m), D), P, atol=1e-12)


def test_apply_g_matches_scalar_rule():
    rng = np.random.default_rng(41)
    X = rng.normal(size=(5, 2))
    D = decompose(gram(Abel(1.0), X))
    lam = 0.05
    out = apply_g(Tikhonov(lam), D)
    expected = (D.eigenvectors * (1.0 / (D.eigenvalues + lam))) @ D.eigenvectors.T
    npt.assert_allclose(out, expected, atol=1e-12)


def test_spec_text_round_trip():
    filters = [Tikhonov(1e-3), SpectralCutoff(0.5), Landweber(50),
               KpcaTruncation(lam=0.01), KpcaTruncation(components=3)]
    for f in filters:
        assert parse_filter(format_filter(f)) == f


def test_spec_text_examples():
    assert format_filter(Tikhonov(1e-3)) == "filter=tikhonov lambda=0.001"
    assert parse_filter("filter=landweber m=50") == Landweber(50)
    with pytest.raises(UsageError):
        parse_filter("filter=unknown lambda=0.1")
