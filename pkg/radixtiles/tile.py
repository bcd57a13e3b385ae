"""The self-affine tile T(A, D): approximations, membership, multiplicity, the origin test and rendering.

Membership of x in T is searched along the branches x -> A x - d. A branch dies once its state leaves a set
known to contain T (the ball of radius R, optionally intersected with a raster cover), so ``Outside`` is
certified while ``Candidate`` only says that x lies within a computed distance of T.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from math import ceil, lcm, sqrt
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from radixtiles import config, defaults
from radixtiles.digits import DigitSet
from radixtiles.errors import DimensionError, ResourceLimit, SpecValueError
from radixtiles.lattice import IntVector, inverse_power_norm
from radixtiles.radix import DecisionReport, absorbing_ball, decide_radix, enumerate_dk_array
from radixtiles.sampling import (SearchContext, chunk_generators, map_chunks, sample_bits, sampling_settings,
                                 survival_depths, translates, uniform_dyadic)

logger = logging.getLogger(__name__)


class Verdict(Enum):
    """Answer of a membership query."""

    OUTSIDE = "Outside"
    CANDIDATE = "Candidate"


class InteriorVerdict(Enum):
    """Answer to "is 0 an interior point of T"."""

    INTERIOR_BY_THEOREM = "InteriorByTheorem"
    BOUNDARY_BY_THEOREM = "BoundaryByTheorem"
    LIKELY_INTERIOR = "LikelyInterior"
    LIKELY_BOUNDARY = "LikelyBoundary"
    INCONCLUSIVE = "Inconclusive"


@dataclass(eq=False)
class TileApprox:
    """The q^k points sum_{j=1..k} A^-j d_j, stored as integer numerators over det(A)^k."""

    depth: int
    numerators: np.ndarray
    denominator: int
    cell_diameter: float

    def __len__(self) -> int:
        return len(self.numerators)

    @cached_property
    def points(self) -> List[Tuple[Fraction, ...]]:
        """Exact rational points."""
        return [tuple(Fraction(int(c), self.denominator) for c in row) for row in self.numerators.tolist()]

    def float_points(self) -> np.ndarray:
        """Points as a float array."""
        return np.array(self.numerators.tolist(), dtype=float) / float(self.denominator)


@dataclass(frozen=True)
class MembershipCertificate:
    """Result of a depth-limited membership search."""

    verdict: Verdict
    depth_used: int
    distance_bound: Optional[float] = None

    def to_json(self) -> dict:
        """Serialize."""
        return {"verdict": self.verdict.value, "depth_used": self.depth_used, "distance_bound": self.distance_bound}


@dataclass(frozen=True)
class MultiplicityEstimate:
    """Sampled number of lattice translates of T covering a point of F."""

    sample_count: int
    mean_multiplicity: float
    min: int
    max: int
    depth: int
    seed: int

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "sample_count": self.sample_count,
            "mean_multiplicity": self.mean_multiplicity,
            "min": self.min,
            "max": self.max,
            "depth": self.depth,
            "seed": self.seed,
        }


class TileCover:
    """Raster superset of T on the window [-R, R]^n.

    Cells hit by the depth-K point cloud are marked and then dilated by the Hausdorff bound of that cloud,
    so every point of T lies in a marked cell.
    """

    def __init__(self, mask: np.ndarray, radius: float, depth: int):
        self.mask = mask
        self.radius = radius
        self.depth = depth
        self.cells = mask.shape[0]
        self.cell_size = 2 * radius / self.cells

    @property
    def n(self) -> int:
        """Dimension."""
        return self.mask.ndim

    @property
    def filled_fraction(self) -> float:
        """Share of marked cells."""
        return float(self.mask.mean())

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Vectorized test of float points (rows) against the marked cells."""
        index = np.floor((points + self.radius) / self.cell_size).astype(np.int64)
        inside = np.all((index >= 0) & (index < self.cells), axis=1)
        result = np.zeros(len(points), dtype=bool)
        if inside.any():
            result[inside] = self.mask[tuple(index[inside].T)]
        return result


def tile_bounding_radius(digit_set: DigitSet) -> float:
    """Return R_T >= sup |xi| over T, the geometric tail K / (1 - |A^-m|) with K and m of the absorbing ball."""
    ball = absorbing_ball(digit_set)
    return ball.K / (1 - inverse_power_norm(digit_set.matrix, ball.m))


def budget_depth(digit_set: DigitSet) -> int:
    """Deepest k whose cloud of q^k points stays within the cover point budget."""
    depth = 1
    while digit_set.q ** (depth + 1) <= defaults.COVER_POINT_BUDGET:
        depth += 1
    return depth


def tile_points(digit_set: DigitSet, k: int, cap: Optional[int] = None) -> TileApprox:
    """Return the depth-k approximation A^-k D_(A,k) of T with its Hausdorff bound R_T |A^-k|.

    Raises
    ------
    ResourceLimit
        If q^k exceeds the cap.
    """
    integers = enumerate_dk_array(digit_set, k, cap)
    det = digit_set.matrix.det
    adjugate_power = np.array(digit_set.matrix.adjugate.power(k).rows, dtype=object)
    numerators = integers.astype(object) @ adjugate_power.T
    denominator = det**k
    if denominator < 0:
        numerators, denominator = -numerators, -denominator

    return TileApprox(
        depth=k,
        numerators=numerators,
        denominator=denominator,
        cell_diameter=tile_bounding_radius(digit_set) * inverse_power_norm(digit_set.matrix, k),
    )


def tile_float_points(digit_set: DigitSet, k: int, cap: Optional[int] = None) -> np.ndarray:
    """Float points of the depth-k approximation, A^-k applied in floating point."""
    integers = enumerate_dk_array(digit_set, k, cap).astype(float)
    inverse = np.linalg.inv(np.array(digit_set.matrix.power(k).rows, dtype=float))
    return integers @ inverse.T


@lru_cache(maxsize=256)
def refined_bounding_radius(digit_set: DigitSet, depth: Optional[int] = None) -> float:
    """Return max |p| / (1 - |A^-k|) over the depth-k cloud, never more than R_T."""
    bound = tile_bounding_radius(digit_set)
    depth = budget_depth(digit_set) if depth is None else depth
    contraction = inverse_power_norm(digit_set.matrix, depth)
    if contraction >= 1:
        return bound
    points = tile_float_points(digit_set, depth)
    largest = float(np.sqrt((points * points).sum(axis=1).max())) * (1 + 1e-9)
    return min(bound, largest / (1 - contraction))


def _dilate_axis(mask: np.ndarray, radius: int, axis: int) -> np.ndarray:
    size = mask.shape[axis]
    padding = [(0, 0)] * mask.ndim
    padding[axis] = (radius + 1, radius)
    sums = np.cumsum(np.pad(mask.astype(np.int32), padding), axis=axis)
    upper = np.take(sums, np.arange(2 * radius + 1, 2 * radius + 1 + size), axis=axis)
    lower = np.take(sums, np.arange(0, size), axis=axis)
    return (upper - lower) > 0


@lru_cache(maxsize=64)
def build_cover(digit_set: DigitSet, depth: Optional[int] = None) -> TileCover:
    """Return a TileCover of T for n <= 3.

    Raises
    ------
    DimensionError
        For n > 3.
    """
    n = digit_set.n
    if n not in defaults.COVER_CELLS:
        raise DimensionError("<= 3", n, "raster covers exist for dimensions 1 to 3")

    depth = budget_depth(digit_set) if depth is None else depth
    radius = refined_bounding_radius(digit_set)
    cells = defaults.COVER_CELLS[n]
    cell_size = 2 * radius / cells

    points = tile_float_points(digit_set, depth)
    index = np.clip(np.floor((points + radius) / cell_size).astype(np.int64), 0, cells - 1)
    mask = np.zeros((cells,) * n, dtype=bool)
    mask[tuple(index.T)] = True

    hausdorff = radius * inverse_power_norm(digit_set.matrix, depth)
    grow = ceil(hausdorff / cell_size) + 1
    for axis in range(n):
        mask = _dilate_axis(mask, grow, axis)

    logger.debug(f"cover of {digit_set.matrix}: depth {depth}, dilation {grow} cells, {mask.mean():.4f} filled")
    return TileCover(mask=mask, radius=radius, depth=depth)


def cover_or_none(digit_set: DigitSet, use_cover: bool = True) -> Optional[TileCover]:
    """The raster cover of T when one is wanted and exists for its dimension."""
    if use_cover and digit_set.n in defaults.COVER_CELLS:
        return build_cover(digit_set)
    return None


def membership(
    x: Sequence,
    digit_set: DigitSet,
    max_depth: int = defaults.DEFAULT_DEPTH,
    radius: Optional[float] = None,
    cover: Optional[TileCover] = None,
) -> MembershipCertificate:
    """Search the branches x -> A x - d to ``max_depth`` in exact arithmetic.

    With x = X / den every branch state is the integer vector s = den * y, updated as s -> A s - den d. A state
    dies when |y| > R (R defaults to the refined bounding radius) or when y leaves the cover.
    """
    point = [Fraction(c) for c in x]
    if len(point) != digit_set.n:
        raise DimensionError(digit_set.n, len(point))

    matrix = digit_set.matrix
    radius = radius if radius is not None else refined_bounding_radius(digit_set)
    den = lcm(*(c.denominator for c in point))
    limit = Fraction(radius) ** 2 * den * den
    frontier = {IntVector(int(c * den) for c in point)}

    def alive(state: IntVector) -> bool:
        if state.norm_squared() > limit:
            return False
        if cover is not None:
            y = np.array([[float(Fraction(c, den)) for c in state]])
            return bool(cover.contains(y)[0])
        return True

    for depth in range(max_depth + 1):
        frontier = {s for s in frontier if alive(s)}
        if not frontier:
            return MembershipCertificate(Verdict.OUTSIDE, depth)
        if depth == max_depth:
            break
        frontier = {(matrix @ s) - (d * den) for s in frontier for d in digit_set}

    nearest = min(sqrt(s.norm_squared()) for s in frontier) / den
    bound = inverse_power_norm(matrix, max_depth) * (nearest + radius)
    return MembershipCertificate(Verdict.CANDIDATE, max_depth, bound)


def search_context(digit_set: DigitSet, use_cover: bool = True) -> SearchContext:
    """Batched search data for T, pruned by the refined bounding radius and, when asked, the raster cover."""
    return SearchContext.of(digit_set, refined_bounding_radius(digit_set), cover_or_none(digit_set, use_cover))


def _multiplicity_chunk(task) -> np.ndarray:
    context, size, sequence, depth, bits = task
    n = context.digits.shape[1]
    scale = 2**bits
    rng = np.random.default_rng(sequence)
    points = rng.integers(-(scale // 2), scale // 2, size=(size, n), dtype=np.int64)
    shifts = translates(n, context.radius + sqrt(n) / 2) * scale
    states = (points[:, None, :] - shifts[None, :, :]).reshape(-1, n)
    last = survival_depths(context, states, scale, depth)
    return (last >= depth).reshape(size, len(shifts)).sum(axis=1)


def multiplicity_estimate(
    digit_set: DigitSet,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
    use_cover: bool = True,
) -> MultiplicityEstimate:
    """Count, for seeded uniform points x of F, the lattice vectors k with x - k a Candidate of T."""
    samples, depth, seed = sampling_settings(samples, depth, seed)

    context = search_context(digit_set, use_cover)
    n = digit_set.n
    bits = sample_bits(context, context.radius + sqrt(n) / 2 + 1)
    tasks = [(context, size, sequence, depth, bits) for size, sequence in chunk_generators(seed, samples)]
    counts = np.concatenate(map_chunks(_multiplicity_chunk, tasks, jobs))

    estimate = MultiplicityEstimate(
        sample_count=samples,
        mean_multiplicity=float(counts.mean()),
        min=int(counts.min()),
        max=int(counts.max()),
        depth=depth,
        seed=seed,
    )
    logger.info(f"multiplicity of {digit_set.matrix}: {estimate}")
    return estimate


def _measure_chunk(task) -> int:
    context, size, sequence, depth, bits = task
    n = context.digits.shape[1]
    rng = np.random.default_rng(sequence)
    states = uniform_dyadic(rng, size, n, context.radius, bits)
    return int((survival_depths(context, states, 2**bits, depth) >= depth).sum())


def measure_estimate(
    digit_set: DigitSet,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> float:
    """Monte-Carlo estimate of the Lebesgue measure of T over the window [-R, R]^n."""
    samples, depth, seed = sampling_settings(samples, depth, seed)

    context = search_context(digit_set)
    bits = sample_bits(context, context.radius + 1)
    tasks = [(context, size, sequence, depth, bits) for size, sequence in chunk_generators(seed, samples)]
    hits = sum(map_chunks(_measure_chunk, tasks, jobs))
    return (2 * context.radius) ** digit_set.n * hits / samples


def self_affinity_check(digit_set: DigitSet, k: int) -> bool:
    """Exact check of A (points at depth k+1) = union over d of (points at depth k) + d."""
    matrix = digit_set.matrix
    finer = tile_points(digit_set, k + 1)
    coarse = tile_points(digit_set, k)

    scaled = set()
    for point in finer.points:
        scaled.add(tuple(sum(a * c for a, c in zip(row, point)) for row in matrix.rows))
    shifted = {tuple(c + d_i for c, d_i in zip(point, d)) for point in coarse.points for d in digit_set}
    return scaled == shifted


def hausdorff_consistent(digit_set: DigitSet, k: int) -> bool:
    """Check that the depth-k and depth-(k+1) clouds lie within the cell diameter of depth k of each other."""
    coarse = tile_float_points(digit_set, k)
    finer = tile_float_points(digit_set, k + 1)
    delta = tile_points(digit_set, k + 1).cell_diameter + tile_points(digit_set, k).cell_diameter

    def directed(source: np.ndarray, target: np.ndarray) -> float:
        largest = 0.0
        for start in range(0, len(source), 1024):
            block = source[start : start + 1024]
            distances = ((block[:, None, :] - target[None, :, :]) ** 2).sum(axis=2)
            largest = max(largest, float(np.sqrt(distances.min(axis=1)).max()))
        return largest

    return max(directed(coarse, finer), directed(finer, coarse)) <= delta * (1 + 1e-9)


def probe_origin(
    digit_set: DigitSet,
    depth: Optional[int] = None,
    probe_radius: Fraction = defaults.DEFAULT_PROBE_RADIUS,
    steps: int = defaults.DEFAULT_PROBE_STEPS,
) -> InteriorVerdict:
    """Query a grid of points of norm <= probe_radius around 0 with exact membership queries.

    Any certified Outside gives LikelyBoundary; Candidates everywhere, all closer to T than probe_radius,
    give LikelyInterior; anything else is Inconclusive.
    """
    depth = config.get_sampling_defaults()["depth"] if depth is None else depth
    radius = Fraction(probe_radius)
    spacing = radius / steps
    cover = cover_or_none(digit_set, True)

    worst = 0.0
    for offsets in itertools.product(range(-steps, steps + 1), repeat=digit_set.n):
        point = [spacing * o for o in offsets]
        if sum(c * c for c in point) > radius * radius:
            continue
        certificate = membership(point, digit_set, depth, cover=cover)
        if certificate.verdict is Verdict.OUTSIDE:
            return InteriorVerdict.LIKELY_BOUNDARY
        worst = max(worst, certificate.distance_bound)

    return InteriorVerdict.LIKELY_INTERIOR if worst < radius else InteriorVerdict.INCONCLUSIVE


def interior_zero_test(
    digit_set: DigitSet,
    depth: Optional[int] = None,
    probe_radius: Fraction = defaults.DEFAULT_PROBE_RADIUS,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    point_cap: Optional[int] = None,
    decision: Optional[DecisionReport] = None,
    multiplicity: Optional[MultiplicityEstimate] = None,
) -> InteriorVerdict:
    """Decide whether 0 is an interior point of T, by theorem where possible and by probing otherwise.

    A positive radix decision puts 0 in the interior. A negative decision for a tile that tiles by Z^n puts 0
    on the boundary. Otherwise, including when the decision hits its resource limit,
    the grid around the origin answers.
    """
    if decision is None:
        try:
            decision = decide_radix(digit_set, point_cap=point_cap)
        except ResourceLimit as exc:
            logger.warning(f"decision skipped, falling back to the origin grid: {exc.message}")

    if decision is not None and decision.yields:
        return InteriorVerdict.INTERIOR_BY_THEOREM

    if decision is not None:
        if multiplicity is None:
            multiplicity = multiplicity_estimate(digit_set, samples=samples, depth=depth, seed=seed)
        if abs(multiplicity.mean_multiplicity - 1) <= defaults.MULTIPLICITY_TOLERANCE:
            return InteriorVerdict.BOUNDARY_BY_THEOREM

    return probe_origin(digit_set, depth, probe_radius)


def render_window(digit_set: DigitSet, width: int, height: int) -> Tuple[float, float, float, float]:
    """Bounding box of the marked cells of the cover, widened about its center to the raster's aspect ratio.

    The window depends on the digit set alone, so rasters of different depths share their pixel grid.
    """
    cover = build_cover(digit_set)
    marked = np.argwhere(cover.mask)
    low = marked.min(axis=0) * cover.cell_size - cover.radius
    high = (marked.max(axis=0) + 1) * cover.cell_size - cover.radius
    center = (low + high) / 2
    pixel = max((high[0] - low[0]) / width, (high[1] - low[1]) / height)
    half_x, half_y = pixel * width / 2, pixel * height / 2
    return (
        float(center[0] - half_x),
        float(center[0] + half_x),
        float(center[1] - half_y),
        float(center[1] + half_y),
    )


def _pixel_centers(width: int, height: int, window: Tuple[float, float, float, float]) -> np.ndarray:
    xmin, xmax, ymin, ymax = window
    xs = xmin + (np.arange(width) + 0.5) * (xmax - xmin) / width
    ys = ymax - (np.arange(height) + 0.5) * (ymax - ymin) / height
    return np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)


def _spread_pixels(digit_set: DigitSet, k: int, width: int, height: int, window) -> np.ndarray:
    """Pixels whose center survives k steps of the batched branch search."""
    context = search_context(digit_set)
    bits = sample_bits(context, sqrt(2) * max(abs(c) for c in window) + 1)
    scale = 2**bits
    states = np.rint(_pixel_centers(width, height, window) * scale).astype(np.int64)
    chunk = defaults.RENDER_CHUNK
    filled = [survival_depths(context, states[s : s + chunk], scale, k) >= k for s in range(0, len(states), chunk)]
    return np.concatenate(filled).reshape(height, width)


def _cloud_pixels(digit_set: DigitSet, k: int, width: int, height: int, window) -> np.ndarray:
    """Pixels holding at least one point of the depth-k cloud."""
    xmin, xmax, ymin, ymax = window
    points = tile_float_points(digit_set, k)
    columns = np.floor((points[:, 0] - xmin) / (xmax - xmin) * width).astype(np.int64)
    rows = np.floor((ymax - points[:, 1]) / (ymax - ymin) * height).astype(np.int64)
    inside = (columns >= 0) & (columns < width) & (rows >= 0) & (rows < height)
    filled = np.zeros((height, width), dtype=bool)
    filled[rows[inside], columns[inside]] = True
    return filled


def render_tile_2d(
    digit_set: DigitSet,
    k: int,
    width: int = defaults.FIGURE1_SIZE[0],
    height: int = defaults.FIGURE1_SIZE[1],
    window: Optional[Tuple[float, float, float, float]] = None,
    out: Optional[str] = None,
    spread: bool = True,
) -> np.ndarray:
    """Rasterize the depth-k approximation of T: filled pixels 0, background 255, y axis pointing up.

    A pixel is filled when its center is a Candidate after k branch steps, that is when it lies in
    A^-k (D_(A,k) + C) for the cover C of T. The filled set contains T and shrinks onto it as k grows, so the
    pixel count settles quickly. With ``spread`` off only the pixels holding a point of the depth-k cloud are
    filled. ``window`` is (xmin, xmax, ymin, ymax) and defaults to ``render_window``.
    With ``out`` the raster is saved as binary PGM or PNG, chosen by the file suffix.

    Raises
    ------
    DimensionError
        Unless n = 2.
    """
    if digit_set.n != 2:
        raise DimensionError(2, digit_set.n, "only planar tiles can be rendered")
    if k < 0:
        raise SpecValueError("depth", "must not be negative")

    if window is None:
        window = render_window(digit_set, width, height)
    pixels = _spread_pixels if spread else _cloud_pixels
    filled = pixels(digit_set, k, width, height, window)
    raster = np.where(filled, 0, 255).astype(np.uint8)
    logger.debug(f"render of {digit_set.matrix} at depth {k}: {int(filled.sum())} of {filled.size} pixels filled")

    if out:
        save_raster(raster, out)
    return raster


def save_raster(raster: np.ndarray, path: str) -> None:
    """Write a grayscale raster as binary PGM (``.pgm``) or PNG (``.png``)."""
    image = Image.fromarray(raster)
    if path.lower().endswith(".png"):
        image.save(path, format="PNG")
    else:
        image.save(path, format="PPM")
    logger.info(f"raster {raster.shape[1]}x{raster.shape[0]} written to {path}")
