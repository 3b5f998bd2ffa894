import math

import numpy as np
import pytest

from gazekit.bundling import SUBDIVISION_POINTS, BundleParams, bundle_saccades


SEG_A = ((0.0, 0.0), (100.0, 0.0))
SEG_B = ((0.0, 30.0), (100.0, 30.0))
SEG_BACK = ((100.0, 15.0), (0.0, 15.0))  # reversed direction


def test_zero_iterations_is_exact_passthrough():
    polys = bundle_saccades([SEG_A, SEG_B], BundleParams(iterations=0))
    assert len(polys) == 2
    assert polys[0].tolist() == [[0.0, 0.0], [100.0, 0.0]]
    assert polys[1].tolist() == [[0.0, 30.0], [100.0, 30.0]]


def test_empty_input():
    assert bundle_saccades([]) == []


def test_endpoints_pinned_exactly():
    rng = np.random.default_rng(61)
    segments = [
        ((rng.uniform(0, 500), rng.uniform(0, 500)), (rng.uniform(0, 500), rng.uniform(0, 500)))
        for _ in range(12)
    ]
    polys = bundle_saccades(segments, BundleParams(iterations=25, kernel_bandwidth=40.0))
    for seg, poly in zip(segments, polys):
        assert poly.shape == (SUBDIVISION_POINTS, 2)
        assert tuple(poly[0]) == seg[0]
        assert tuple(poly[-1]) == seg[1]
        assert np.isfinite(poly).all()


def test_parallel_segments_attract():
    polys = bundle_saccades([SEG_A, SEG_B], BundleParams(iterations=20, kernel_bandwidth=40.0))
    mid = SUBDIVISION_POINTS // 2
    gap_before = 30.0
    gap_after = abs(polys[1][mid, 1] - polys[0][mid, 1])
    assert gap_after < gap_before * 0.5
    # Both pulled toward the shared corridor between y=0 and y=30.
    assert 0.0 < polys[0][mid, 1] and polys[1][mid, 1] < 30.0


def test_opposing_directions_stay_apart():
    polys = bundle_saccades([SEG_A, SEG_BACK], BundleParams(iterations=20, kernel_bandwidth=60.0))
    mid = SUBDIVISION_POINTS // 2
    # Direction difference is 180deg >= 45deg split: neither deforms toward
    # the other, so interiors keep their original y.
    assert polys[0][mid, 1] == pytest.approx(0.0, abs=1e-9)
    assert polys[1][mid, 1] == pytest.approx(15.0, abs=1e-9)


def test_direction_split_is_tunable():
    diag = ((0.0, 0.0), (100.0, 70.0))  # ~35deg off SEG_A
    tight = bundle_saccades([SEG_A, diag], BundleParams(iterations=10, direction_split_deg=10.0))
    loose = bundle_saccades([SEG_A, diag], BundleParams(iterations=10, direction_split_deg=90.0))
    mid = SUBDIVISION_POINTS // 2
    assert tight[0][mid, 1] == pytest.approx(0.0, abs=1e-9)  # incompatible: undisturbed
    assert abs(loose[0][mid, 1]) > 0.1  # compatible: pulled off axis


def test_single_segment_stays_straight():
    polys = bundle_saccades([SEG_A], BundleParams(iterations=30))
    assert np.allclose(polys[0][:, 1], 0.0, atol=1e-9)
    assert np.all(np.diff(polys[0][:, 0]) > 0)


def test_smoothing_straightens():
    wavy = [SEG_A, ((0.0, 8.0), (100.0, 8.0)), ((0.0, -8.0), (100.0, -8.0))]

    def roughness(poly):
        second = poly[:-2] - 2 * poly[1:-1] + poly[2:]
        return float(np.abs(second).sum())

    rough = bundle_saccades(wavy, BundleParams(iterations=15, smoothing=0.0))
    smooth = bundle_saccades(wavy, BundleParams(iterations=15, smoothing=0.8))
    assert sum(map(roughness, smooth)) <= sum(map(roughness, rough)) + 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        BundleParams(iterations=-1)
    with pytest.raises(ValueError):
        BundleParams(kernel_bandwidth=0.0)
    with pytest.raises(ValueError):
        BundleParams(smoothing=1.5)
    with pytest.raises(ValueError):
        BundleParams(direction_split_deg=0.0)
    with pytest.raises(ValueError):
        BundleParams(direction_split_deg=181.0)


def test_angle_wraparound_compatibility():
    # 350deg vs 10deg differ by 20deg, compatible despite the wrap.
    a = ((0.0, 0.0), (math.cos(math.radians(-10)) * 100, math.sin(math.radians(-10)) * 100))
    b = ((0.0, 5.0), (math.cos(math.radians(10)) * 100, 5 + math.sin(math.radians(10)) * 100))
    polys = bundle_saccades([a, b], BundleParams(iterations=10, kernel_bandwidth=30.0))
    mid = SUBDIVISION_POINTS // 2
    assert abs(polys[0][mid, 1]) > 1e-6  # pulled upward by its neighbor
