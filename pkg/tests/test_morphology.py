import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from morphoseg.exceptions import ParameterError, PreconditionError
from morphoseg.morphology import (
    closing_by_reconstruction,
    dilate,
    disk,
    erode,
    opening_by_reconstruction,
    reconstruct_dilation,
    reconstruct_erosion,
)
from oracles import (
    brute_dilate,
    brute_erode,
    disk_offsets,
    naive_closing,
    naive_reconstruct_dilation,
    naive_reconstruct_erosion,
)

# dyadic samples keep 1 - x exact, so duality checks can be bit-exact
dyadic = arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)),
                elements=st.integers(0, 256).map(lambda k: k / 256))


class TestDisk:
    def test_radius_zero_is_origin(self):
        assert list(disk(0).offsets) == [(0, 0)]

    def test_radius_one_is_plus(self):
        assert len(disk(1)) == 5
        assert (1, 1) not in disk(1)
        assert (0, -1) in disk(1)

    @pytest.mark.parametrize("r", [2, 3, 5, 12])
    def test_offsets_match_definition(self, r):
        got = set(disk(r).offsets)
        assert got == set(disk_offsets(r))

    def test_footprint_symmetric(self):
        fp = disk(4).footprint
        assert fp.shape == (9, 9)
        np.testing.assert_array_equal(fp, fp.T)
        np.testing.assert_array_equal(fp, fp[::-1])

    def test_negative_radius(self):
        with pytest.raises(ParameterError):
            disk(-1)


class TestFlatOperators:
    def test_constant_is_fixed(self):
        img = np.full((6, 5), 0.3)
        for r in (0, 1, 4):
            np.testing.assert_array_equal(dilate(img, disk(r)), img)
            np.testing.assert_array_equal(erode(img, disk(r)), img)

    def test_dilate_impulse(self):
        img = np.zeros((5, 5))
        img[2, 2] = 1.0
        out = dilate(img, disk(1))
        expected = np.zeros((5, 5))
        expected[[1, 2, 2, 2, 3], [2, 1, 2, 3, 2]] = 1.0
        np.testing.assert_array_equal(out, expected)

    def test_erode_hole(self):
        img = np.ones((5, 5))
        img[2, 2] = 0.0
        out = erode(img, disk(1))
        assert out.sum() == 25 - 5
        assert out[1, 2] == out[2, 1] == out[2, 2] == 0.0

    @pytest.mark.parametrize("r", [1, 2, 3, 6])
    def test_against_brute_force(self, rng, r):
        img = rng.random((7, 9))
        np.testing.assert_array_equal(dilate(img, disk(r)), brute_dilate(img, r))
        np.testing.assert_array_equal(erode(img, disk(r)), brute_erode(img, r))

    def test_accepts_plain_radius(self, rng):
        img = rng.random((6, 6))
        np.testing.assert_array_equal(dilate(img, 2), dilate(img, disk(2)))

    @settings(max_examples=60, deadline=None)
    @given(dyadic, st.integers(0, 4))
    def test_erosion_anti_extensive_dilation_extensive(self, img, r):
        assert np.all(erode(img, disk(r)) <= img)
        assert np.all(dilate(img, disk(r)) >= img)

    @settings(max_examples=60, deadline=None)
    @given(dyadic, st.integers(0, 4))
    def test_duality(self, img, r):
        np.testing.assert_array_equal(erode(img, disk(r)), 1 - dilate(1 - img, disk(r)))


class TestReconstruction:
    def test_marker_equal_mask(self, rng):
        g = rng.random((6, 6))
        np.testing.assert_array_equal(reconstruct_dilation(g, g), g)
        np.testing.assert_array_equal(reconstruct_erosion(g, g), g)

    def test_one_dimensional_plateaus(self):
        g = np.array([[0, 3, 3, 0, 2, 2, 0]]) / 3
        f = np.array([[0, 3, 0, 0, 0, 0, 0]]) / 3
        np.testing.assert_array_equal(
            reconstruct_dilation(f, g), np.array([[0, 3, 3, 0, 0, 0, 0]]) / 3
        )

    def test_constant_min_marker(self, rng):
        g = rng.integers(0, 4, size=(8, 8)) / 4
        f = np.full_like(g, g.min())
        np.testing.assert_array_equal(reconstruct_dilation(f, g), naive_reconstruct_dilation(f, g))

    def test_constant_max_marker(self, rng):
        g = rng.integers(0, 4, size=(8, 8)) / 4
        f = np.full_like(g, g.max())
        np.testing.assert_array_equal(reconstruct_erosion(f, g), naive_reconstruct_erosion(f, g))

    def test_random_pairs_match_naive(self, rng):
        for _ in range(50):
            g = rng.random((8, 8))
            f = g * rng.random((8, 8))
            np.testing.assert_array_equal(reconstruct_dilation(f, g), naive_reconstruct_dilation(f, g))
            f2 = g + (1 - g) * rng.random((8, 8))
            np.testing.assert_array_equal(reconstruct_erosion(f2, g), naive_reconstruct_erosion(f2, g))

    def test_precondition_names_pixel(self):
        g = np.zeros((3, 3))
        f = np.zeros((3, 3))
        f[1, 2] = 0.5
        with pytest.raises(PreconditionError, match=r"row=1, col=2"):
            reconstruct_dilation(f, g)
        with pytest.raises(PreconditionError):
            reconstruct_erosion(-f, g)

    def test_eight_connectivity_reaches_diagonal(self):
        g = np.array([[1.0, 0.0], [0.0, 1.0]])
        f = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert reconstruct_dilation(f, g, connectivity=4)[1, 1] == 0.0
        assert reconstruct_dilation(f, g, connectivity=8)[1, 1] == 1.0

    @settings(max_examples=80, deadline=None)
    @given(dyadic, st.data())
    def test_bounds_and_stability(self, g, data):
        scale = data.draw(arrays(np.float64, g.shape, elements=st.integers(0, 4).map(lambda k: k / 4)))
        f = g * scale
        r = reconstruct_dilation(f, g)
        assert np.all(f <= r) and np.all(r <= g)
        np.testing.assert_array_equal(np.minimum(dilate(r, disk(1)), g), r)

    @settings(max_examples=80, deadline=None)
    @given(dyadic, st.data())
    def test_duality_exact(self, g, data):
        scale = data.draw(arrays(np.float64, g.shape, elements=st.integers(0, 4).map(lambda k: k / 4)))
        f = 1 - (1 - g) * scale  # f >= g
        np.testing.assert_array_equal(
            reconstruct_erosion(f, g), 1 - reconstruct_dilation(1 - f, 1 - g)
        )


class TestByReconstruction:
    def test_radius_zero_identity(self, rng):
        g = rng.random((5, 6))
        np.testing.assert_array_equal(closing_by_reconstruction(g, disk(0)), g)
        np.testing.assert_array_equal(opening_by_reconstruction(g, disk(0)), g)

    @pytest.mark.parametrize("r", [0, 2, 7])
    def test_constant(self, r):
        g = np.full((7, 7), 0.625)
        np.testing.assert_array_equal(closing_by_reconstruction(g, disk(r)), g)
        np.testing.assert_array_equal(opening_by_reconstruction(g, disk(r)), g)

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_closing_matches_naive(self, rng, r):
        for _ in range(5):
            g = rng.random((10, 10))
            np.testing.assert_array_equal(closing_by_reconstruction(g, disk(r)), naive_closing(g, r))

    def test_opening_is_composition(self, rng):
        g = rng.random((10, 10))
        b = disk(2)
        r1 = reconstruct_erosion(dilate(g, b), g)
        expected = reconstruct_dilation(erode(r1, b), r1)
        np.testing.assert_array_equal(opening_by_reconstruction(g, b), expected)

    @pytest.mark.parametrize("r", [12, 15, 30])
    def test_limits(self, rng, r):
        g = rng.random((8, 8))
        np.testing.assert_array_equal(closing_by_reconstruction(g, disk(r)), np.full_like(g, g.min()))
        np.testing.assert_array_equal(opening_by_reconstruction(g, disk(r)), np.full_like(g, g.max()))

    @settings(max_examples=60, deadline=None)
    @given(dyadic, st.integers(0, 5))
    def test_range_and_duality(self, g, r):
        c = closing_by_reconstruction(g, disk(r))
        assert g.min() <= c.min() and c.max() <= g.max()
        np.testing.assert_array_equal(opening_by_reconstruction(g, disk(r)),
                                      1 - closing_by_reconstruction(1 - g, disk(r)))

    def test_removes_small_dark_pit(self):
        g = np.full((9, 9), 0.5)
        g[4, 4] = 0.0
        np.testing.assert_array_equal(closing_by_reconstruction(g, disk(1)), np.full((9, 9), 0.5))

    def test_preserves_large_dark_basin(self):
        g = np.full((15, 15), 0.5)
        g[3:12, 3:12] = 0.0
        np.testing.assert_array_equal(closing_by_reconstruction(g, disk(2)), g)
