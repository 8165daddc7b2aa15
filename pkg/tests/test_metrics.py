"""Quality measures, including SSIM against the scikit-image reference."""

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from nnlowrank import (
    NegativityStats,
    QualityReport,
    derive_rng,
    quality_report,
    r_squared,
    relative_errors,
    ssim_bandwise_mean,
    ssim_image,
)


def test_relative_errors_hand_values():
    X = np.array([[3.0, 0.0], [0.0, 4.0]])
    Y = np.array([[3.0, 0.0], [0.0, 2.0]])
    rf, rc = relative_errors(X, Y)
    assert rf == pytest.approx(2.0 / 5.0)
    assert rc == pytest.approx(2.0 / 4.0)
    with pytest.raises(ValueError):
        relative_errors(np.zeros((2, 2)), Y)
    with pytest.raises(ValueError):
        relative_errors(X, np.zeros((3, 2)))


def test_r_squared_cases():
    g = derive_rng(0, "r2", 0)
    X = g.standard_normal((6, 7))
    assert r_squared(X, X) == pytest.approx(1.0)
    # predicting the mean everywhere gives exactly zero
    assert r_squared(X, np.full_like(X, X.mean())) == pytest.approx(0.0, abs=1e-12)
    assert r_squared(X, -X) < 0  # worse than the mean predictor
    with pytest.raises(ValueError):
        r_squared(np.ones((3, 3)), np.ones((3, 3)))


def test_ssim_identical_images_is_one():
    X = derive_rng(1, "ssim", 0).uniform(0, 1, (40, 40))
    assert ssim_image(X, X) == pytest.approx(1.0)


def test_ssim_matches_skimage_away_from_boundary():
    g = derive_rng(2, "ssim", 0)
    X = g.uniform(0, 1, (48, 48))
    Y = np.clip(X + 0.05 * g.standard_normal((48, 48)), 0, 1)
    mine, mymap = ssim_image(X, Y, data_range=1.0, full=True)
    ref, refmap = structural_similarity(
        X, Y, data_range=1.0, gaussian_weights=True, sigma=1.5,
        use_sample_covariance=False, full=True)
    # boundary handling differs (we keep padded windows, skimage crops),
    # so compare the interior of the maps and the cropped means
    pad = 5
    np.testing.assert_allclose(mymap[pad:-pad, pad:-pad],
                               refmap[pad:-pad, pad:-pad], atol=1e-10)
    assert mine == pytest.approx(
        float(refmap[pad:-pad, pad:-pad].mean()), abs=5e-3)


def test_ssim_scale_invariance_via_data_range():
    g = derive_rng(3, "ssim", 0)
    X = g.uniform(0, 1, (32, 32))
    Y = np.clip(X + 0.1 * g.standard_normal((32, 32)), 0, 1)
    a = ssim_image(X, Y, data_range=1.0)
    b = ssim_image(50.0 * X, 50.0 * Y, data_range=50.0)
    assert a == pytest.approx(b, rel=1e-12)


def test_ssim_input_validation():
    X = np.zeros((8, 8))
    with pytest.raises(ValueError):
        ssim_image(X, np.zeros((8, 9)))
    with pytest.raises(ValueError):
        ssim_image(X, X, data_range=0.0)
    with pytest.raises(ValueError):
        ssim_bandwise_mean(np.zeros((4, 4, 4, 4)), np.zeros((4, 4, 4, 4)))


def test_ssim_bandwise_mean_averages_bands():
    g = derive_rng(4, "ssim", 0)
    X = g.uniform(0, 1, (20, 20, 3))
    Y = np.clip(X + 0.1 * g.standard_normal(X.shape), 0, 1)
    per_band = [ssim_image(X[:, :, b], Y[:, :, b]) for b in range(3)]
    assert ssim_bandwise_mean(X, Y) == pytest.approx(float(np.mean(per_band)))


def test_quality_report_bundles_everything():
    g = derive_rng(5, "qr", 0)
    X = g.uniform(0.1, 1, (16, 16, 16))
    Y = X + 0.2 * g.standard_normal(X.shape)
    q = quality_report(X, Y)
    rf, rc = relative_errors(X, Y)
    assert q.rel_err_frobenius == pytest.approx(rf)
    assert q.rel_err_chebyshev == pytest.approx(rc)
    assert q.r_squared == pytest.approx(r_squared(X, Y))
    assert q.ssim_bandwise_mean == pytest.approx(ssim_bandwise_mean(X, Y))
    assert q.negativity.fraction > 0  # the noise sends some entries below 0

    d = q.to_dict()
    back = QualityReport.from_dict(d)
    assert back == q

    q4 = quality_report(np.ones((3, 3, 3, 3)) + 0.1,
                        np.ones((3, 3, 3, 3)))
    assert q4.ssim_bandwise_mean is None


def test_quality_report_validation():
    with pytest.raises(ValueError):
        QualityReport(rel_err_frobenius=-1.0, rel_err_chebyshev=0.0,
                      r_squared=0.5, negativity=NegativityStats(0, 0, 0))
    with pytest.raises(ValueError):
        QualityReport(rel_err_frobenius=0.1, rel_err_chebyshev=0.1,
                      r_squared=1.5, negativity=NegativityStats(0, 0, 0))
