"""Tile approximation, membership, multiplicity and rendering tests."""
import itertools
import os
from fractions import Fraction

import numpy as np
import pytest
from PIL import Image

from radixtiles.digits import canonical_digits, validate_digit_set
from radixtiles.errors import DimensionError, SpecValueError
from radixtiles.tile import (InteriorVerdict, Verdict, build_cover, hausdorff_consistent, interior_zero_test,
                             measure_estimate, membership, multiplicity_estimate, probe_origin,
                             refined_bounding_radius, render_tile_2d, render_window, self_affinity_check,
                             tile_bounding_radius, tile_float_points, tile_points)

from ..constants import (BINARY_DIGITS, DEPTH, MULTIPLICITY_TOLERANCE, SAMPLES, SEED, SUBLATTICE_DIGITS,
                         SUBLATTICE_MULTIPLICITY, THREE_I1, THREE_I2, TWIN_DRAGON, TWIN_DRAGON_DIGITS, TWO,
                         TWO_I2, UNIT_SQUARE_DIGITS)

# Raster of the unit square tile on [-1, 1]^2 at 8 x 8 pixels
UNIT_SQUARE_GOLDEN = os.path.join(os.path.dirname(__file__), "..", "data", "unit_square_8x8.pgm")


@pytest.fixture
def binary():
    """T = [0, 1]."""
    return validate_digit_set(TWO, BINARY_DIGITS)


@pytest.fixture
def sublattice():
    """T = [0, 3], covering the line three times."""
    return validate_digit_set(TWO, SUBLATTICE_DIGITS)


@pytest.fixture
def twin_dragon():
    """The twin dragon with D = {0, e1}."""
    return validate_digit_set(TWIN_DRAGON, TWIN_DRAGON_DIGITS)


class TestTilePoints:
    """Depth-k approximations A^-k D_(A,k)."""

    def test_binary(self, binary):
        """Eighths of [0, 1)."""
        approx = tile_points(binary, 3)
        assert approx.denominator == 8
        assert sorted(approx.points) == [(Fraction(i, 8),) for i in range(8)]

    def test_negative_determinant(self):
        """A = -2 keeps a positive denominator."""
        digit_set = validate_digit_set([[-2]], BINARY_DIGITS)
        approx = tile_points(digit_set, 3)
        expected = {
            (sum(Fraction(d, (-2) ** j) for j, d in enumerate(word, start=1)),)
            for word in itertools.product([0, 1], repeat=3)
        }
        assert approx.denominator == 8
        assert set(approx.points) == expected

    def test_float_points_agree(self, twin_dragon):
        """Floating point clouds match the exact ones."""
        approx = tile_points(twin_dragon, 6)
        assert np.allclose(approx.float_points(), tile_float_points(twin_dragon, 6))

    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_self_affinity(self, twin_dragon, k):
        """A T_(k+1) = T_k + D exactly."""
        assert self_affinity_check(twin_dragon, k)

    def test_self_affinity_canonical(self):
        """Also for canonical digits of 3 I_2."""
        assert self_affinity_check(canonical_digits(THREE_I2), 2)

    @pytest.mark.parametrize("k", [2, 4, 6])
    def test_hausdorff(self, twin_dragon, k):
        """Consecutive clouds are within the cell diameter bound."""
        assert hausdorff_consistent(twin_dragon, k)

    def test_cell_diameter_shrinks(self, twin_dragon):
        """The Hausdorff bound decreases with depth."""
        assert tile_points(twin_dragon, 8).cell_diameter < tile_points(twin_dragon, 4).cell_diameter


class TestBoundingRadius:
    """Radii of balls around 0 containing T."""

    def test_binary(self, binary):
        """sup |T| = 1."""
        assert tile_bounding_radius(binary) == pytest.approx(1, rel=1e-6)

    def test_sublattice(self, sublattice):
        """sup |T| = 3."""
        assert tile_bounding_radius(sublattice) == pytest.approx(3, rel=1e-6)

    @pytest.mark.parametrize("rows, digits", [(TWO, BINARY_DIGITS), (TWIN_DRAGON, TWIN_DRAGON_DIGITS)])
    def test_refined(self, rows, digits):
        """The refined radius is at most R_T and still bounds the cloud."""
        digit_set = validate_digit_set(rows, digits)
        refined = refined_bounding_radius(digit_set)
        assert refined <= tile_bounding_radius(digit_set)
        points = tile_float_points(digit_set, 8)
        assert np.sqrt((points * points).sum(axis=1)).max() <= refined


class TestMembership:
    """Exact branch search with certified Outside."""

    def test_inside(self, binary):
        """1/2 lies in [0, 1]."""
        certificate = membership([Fraction(1, 2)], binary, max_depth=10)
        assert certificate.verdict is Verdict.CANDIDATE
        assert certificate.distance_bound < 0.01

    @pytest.mark.parametrize("x", [Fraction(2), Fraction(-1, 2), Fraction(5, 4)])
    def test_outside(self, binary, x):
        """Points away from [0, 1] are certified outside."""
        assert membership([x], binary, max_depth=10).verdict is Verdict.OUTSIDE

    def test_outside_with_cover(self, binary):
        """A cover prunes at once."""
        certificate = membership([Fraction(-1, 2)], binary, max_depth=10, cover=build_cover(binary))
        assert certificate.verdict is Verdict.OUTSIDE
        assert certificate.depth_used == 0

    def test_dimension(self, twin_dragon):
        """The point must live in R^n."""
        with pytest.raises(DimensionError):
            membership([0], twin_dragon)

    @pytest.mark.parametrize("fixture, depth", [("binary", 5), ("sublattice", 5), ("twin_dragon", 6)])
    def test_outside_is_sound(self, request, fixture, depth):
        """No cloud point is ever certified outside, with or without a cover."""
        digit_set = request.getfixturevalue(fixture)
        cover = build_cover(digit_set)
        for point in tile_points(digit_set, depth).points:
            assert membership(list(point), digit_set, max_depth=8).verdict is Verdict.CANDIDATE
            assert membership(list(point), digit_set, max_depth=8, cover=cover).verdict is Verdict.CANDIDATE

    def test_cover_contains_tile(self, twin_dragon):
        """Every cloud point lies in a marked cell."""
        cover = build_cover(twin_dragon)
        assert cover.contains(tile_float_points(twin_dragon, 10)).all()
        assert 0 < cover.filled_fraction < 1


class TestMultiplicity:
    """Sampled covering multiplicity of the translates of T."""

    def test_binary(self, binary):
        """[0, 1] tiles by Z."""
        estimate = multiplicity_estimate(binary, samples=SAMPLES, depth=DEPTH, seed=SEED)
        assert abs(estimate.mean_multiplicity - 1) <= MULTIPLICITY_TOLERANCE
        assert estimate.min >= 1
        assert estimate.sample_count == SAMPLES

    def test_sublattice(self, sublattice):
        """[0, 3] covers the line three times."""
        estimate = multiplicity_estimate(sublattice, samples=SAMPLES, depth=DEPTH, seed=SEED)
        low, high = SUBLATTICE_MULTIPLICITY
        assert low <= estimate.mean_multiplicity <= high

    @pytest.mark.slow
    def test_twin_dragon(self, twin_dragon):
        """The twin dragon tiles by Z^2."""
        estimate = multiplicity_estimate(twin_dragon, samples=SAMPLES, depth=14, seed=SEED)
        assert abs(estimate.mean_multiplicity - 1) <= MULTIPLICITY_TOLERANCE

    def test_seeded(self, binary):
        """The same seed gives the same estimate, with or without worker processes."""
        first = multiplicity_estimate(binary, samples=SAMPLES, depth=DEPTH, seed=SEED)
        second = multiplicity_estimate(binary, samples=SAMPLES, depth=DEPTH, seed=SEED, jobs=2)
        assert first == second

    @pytest.mark.parametrize("samples, depth", [(0, DEPTH), (SAMPLES, 0)])
    def test_rejects_empty(self, binary, samples, depth):
        """Zero samples or depth are errors, not requests for the defaults."""
        with pytest.raises(SpecValueError):
            multiplicity_estimate(binary, samples=samples, depth=depth, seed=SEED)


class TestMeasure:
    """Monte-Carlo Lebesgue measure."""

    def test_binary(self, binary):
        """|[0, 1]| = 1."""
        assert measure_estimate(binary, samples=SAMPLES, depth=DEPTH, seed=SEED) == pytest.approx(1, abs=0.1)

    def test_sublattice(self, sublattice):
        """|[0, 3]| = 3."""
        assert measure_estimate(sublattice, samples=SAMPLES, depth=DEPTH, seed=SEED) == pytest.approx(3, abs=0.25)

    @pytest.mark.parametrize("samples, depth", [(0, DEPTH), (-5, DEPTH), (SAMPLES, 0)])
    def test_rejects_empty(self, binary, samples, depth):
        """Zero samples or depth are errors, not requests for the defaults."""
        with pytest.raises(SpecValueError):
            measure_estimate(binary, samples=samples, depth=depth, seed=SEED)


class TestInterior:
    """Is 0 an interior point of T."""

    def test_three_grid(self):
        """T = [-1/2, 1/2] for A = 3 with canonical digits."""
        assert probe_origin(canonical_digits(THREE_I1), depth=DEPTH) is InteriorVerdict.LIKELY_INTERIOR

    def test_three_theorem(self):
        """A positive decision settles it."""
        verdict = interior_zero_test(canonical_digits(THREE_I1), depth=DEPTH, samples=SAMPLES, seed=SEED)
        assert verdict is InteriorVerdict.INTERIOR_BY_THEOREM

    def test_binary_grid(self, binary):
        """-1/20 is outside [0, 1]."""
        assert probe_origin(binary, depth=DEPTH) is InteriorVerdict.LIKELY_BOUNDARY

    def test_binary_theorem(self, binary):
        """A negative decision for a lattice tiling puts 0 on the boundary."""
        verdict = interior_zero_test(binary, depth=DEPTH, samples=SAMPLES, seed=SEED)
        assert verdict is InteriorVerdict.BOUNDARY_BY_THEOREM


class TestRender:
    """Rasters of planar tiles."""

    def test_unit_square(self):
        """2 I_2 with D = {0, 1}^2 fills its window up to a thin margin."""
        digit_set = validate_digit_set(TWO_I2, UNIT_SQUARE_DIGITS)
        raster = render_tile_2d(digit_set, 8, width=64, height=64)
        assert raster.shape == (64, 64)
        assert (raster == 0).mean() > 0.9
        assert raster[32, 32] == 0

    def test_golden_unit_square(self, tmp_path):
        """On [-1, 1]^2 the unit square is exactly the upper right quadrant."""
        digit_set = validate_digit_set(TWO_I2, UNIT_SQUARE_DIGITS)
        path = tmp_path / "square.pgm"
        render_tile_2d(digit_set, 4, width=8, height=8, window=(-1, 1, -1, 1), out=str(path))
        with open(UNIT_SQUARE_GOLDEN, "rb") as golden:
            assert path.read_bytes() == golden.read()

    def test_depth_zero_cloud(self, twin_dragon):
        """Without spreading, depth 0 marks the pixel of the origin only."""
        raster = render_tile_2d(twin_dragon, 0, width=9, height=9, window=(-1, 1, -1, 1), spread=False)
        assert (raster == 0).sum() == 1
        assert raster[4, 4] == 0

    def test_window_holds_tile(self, twin_dragon):
        """The default window contains the cloud and matches the raster's aspect ratio."""
        xmin, xmax, ymin, ymax = render_window(twin_dragon, 200, 100)
        points = tile_float_points(twin_dragon, 10)
        assert (points[:, 0] > xmin).all() and (points[:, 0] < xmax).all()
        assert (points[:, 1] > ymin).all() and (points[:, 1] < ymax).all()
        assert (xmax - xmin) / (ymax - ymin) == pytest.approx(2)
        assert xmax - xmin < 2 * tile_bounding_radius(twin_dragon)

    def test_window_fixed_across_depths(self, twin_dragon):
        """Rasters of different depths share their window, and deeper ones only lose pixels."""
        coarse = render_tile_2d(twin_dragon, 8, width=120, height=120)
        fine = render_tile_2d(twin_dragon, 12, width=120, height=120)
        assert not ((fine == 0) & (coarse == 255)).any()

    def test_area(self, twin_dragon):
        """Filled pixels times pixel area approximate m(T) = 1."""
        width = height = 200
        xmin, xmax, ymin, ymax = render_window(twin_dragon, width, height)
        raster = render_tile_2d(twin_dragon, 16, width=width, height=height)
        pixel_area = (xmax - xmin) * (ymax - ymin) / (width * height)
        assert (raster == 0).sum() * pixel_area == pytest.approx(1, rel=0.05)

    def test_pixel_count_settles(self, twin_dragon):
        """The filled fraction at depth 16 lies within 2% of the depth-20 value."""
        reference = (render_tile_2d(twin_dragon, 20, width=256, height=256) == 0).mean()
        fraction = (render_tile_2d(twin_dragon, 16, width=256, height=256) == 0).mean()
        assert abs(fraction - reference) <= 0.02 * reference

    def test_planar_only(self, binary):
        """Rendering needs n = 2."""
        with pytest.raises(DimensionError):
            render_tile_2d(binary, 3)

    def test_negative_depth(self, twin_dragon):
        """The depth counts digits."""
        with pytest.raises(SpecValueError):
            render_tile_2d(twin_dragon, -1)

    def test_deterministic(self, twin_dragon):
        """Two renders are identical."""
        first = render_tile_2d(twin_dragon, 8, width=100, height=80)
        assert np.array_equal(first, render_tile_2d(twin_dragon, 8, width=100, height=80))

    @pytest.mark.parametrize("suffix", ["png", "pgm"])
    def test_save(self, twin_dragon, tmp_path, suffix):
        """PNG and binary PGM files."""
        path = tmp_path / f"dragon.{suffix}"
        raster = render_tile_2d(twin_dragon, 6, width=40, height=30, out=str(path))
        with Image.open(path) as image:
            assert image.size == (40, 30)
            assert np.array_equal(np.asarray(image), raster)
        if suffix == "pgm":
            assert path.read_bytes().startswith(b"P5")
