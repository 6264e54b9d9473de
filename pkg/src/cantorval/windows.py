"""The internal-space graph-directed IFS of the windows.

Each window satisfies W_i = ⋃_j ⋃_{t ∈ T_ij} (λ*·W_j + t*). Exact work (the
interval solution, certified hulls) uses rationals and Q(λ); sampling uses
numpy at double precision.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, floor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .errors import BadSampling, NotPisotUnit, SingularSystem
from .geometry import DisplacementMatrix, Interval
from .quadratic import PFData, QuadField, QuadNum, is_pisot_unit, to_real
from .substitution import LETTERS, Letter

DEFAULT_BURN_IN = 100
HULL_GRID = 2 ** 64
ENCLOSURE_EPS = Fraction(1, 2 ** 100)


@dataclass(frozen=True)
class AffineMap:
    """w ↦ λ*·w + t*, mapping the source window into the target window."""
    target_window: Letter
    source_window: Letter
    translate: QuadNum
    contraction_star: QuadNum

    def __post_init__(self):
        c = self.contraction_star
        if (c * c - 1).sign() >= 0:
            raise NotPisotUnit(f"Map with factor {c} is not a contraction")

    @property
    def translate_star(self) -> QuadNum:
        return self.translate.star()

    def __call__(self, w: QuadNum) -> QuadNum:
        return self.contraction_star * w + self.translate_star

    def image(self, u: QuadNum, v: QuadNum) -> Tuple[QuadNum, QuadNum]:
        """Exact image of [u, v]; orientation flips when λ* < 0."""
        if self.contraction_star.sign() < 0:
            return self(v), self(u)
        return self(u), self(v)


@dataclass(frozen=True)
class WindowSystem:
    maps: Tuple[AffineMap, ...]
    field: QuadField

    def by_target(self, letter: Letter) -> List[AffineMap]:
        return [m for m in self.maps if m.target_window == letter]

    def by_source(self, letter: Letter) -> List[AffineMap]:
        return [m for m in self.maps if m.source_window == letter]

    @property
    def contraction(self) -> QuadNum:
        return self.field.lam_star


@dataclass
class IntervalSolution:
    """Result of solving the window system under the interval ansatz."""
    success: bool
    windows: Optional[Dict[Letter, Interval]] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return not self.success


@dataclass(frozen=True)
class HullBounds:
    bounds: Dict[Letter, Tuple[Fraction, Fraction]]
    err: Fraction

    def interval(self, letter: Letter, field: QuadField) -> Interval:
        lo, hi = self.bounds[letter]
        return Interval(field.num(lo), field.num(hi))

    def widened(self, letter: Letter) -> Tuple[Fraction, Fraction]:
        lo, hi = self.bounds[letter]
        return lo - self.err, hi + self.err

    @property
    def diameter(self) -> Fraction:
        return max(hi - lo for lo, hi in self.bounds.values())


@dataclass
class PointCloud:
    positions: Dict[Letter, np.ndarray]
    seed: int
    samples: int
    burn_in: int
    streams: int = 1

    def of(self, letter: Letter) -> np.ndarray:
        return self.positions[letter]

    def union(self) -> np.ndarray:
        return np.sort(np.concatenate([self.positions[letter] for letter in LETTERS]))

    def __len__(self) -> int:
        return sum(len(self.positions[letter]) for letter in LETTERS)

    def rows(self) -> List[Tuple[Letter, float]]:
        return [(letter, float(p)) for letter in LETTERS for p in self.positions[letter]]


def build_window_system(T: DisplacementMatrix, f: QuadField) -> WindowSystem:
    if not is_pisot_unit(f):
        raise NotPisotUnit(f"λ of {f} is not a Pisot unit", {'trace': f.trace, 'det': f.det})
    lam_star = f.lam_star
    maps = tuple(AffineMap(i, j, t, lam_star) for i in LETTERS for j, t in T.pieces(i))
    return WindowSystem(maps, f)


# endpoint variables: u_a, v_a, u_b, v_b
def _var(letter: Letter, upper: bool) -> int:
    return 2 * LETTERS.index(letter) + int(upper)


def _solve_exact(rows: List[List[QuadNum]], rhs: List[QuadNum]) -> List[QuadNum]:
    size = len(rows)
    matrix = [row[:] + [value] for row, value in zip(rows, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if matrix[r][col]), None)
        if pivot is None:
            raise SingularSystem("Endpoint system is singular")
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        inv = matrix[col][col].inverse()
        matrix[col] = [entry * inv for entry in matrix[col]]
        for r in range(size):
            if r != col and matrix[r][col]:
                factor = matrix[r][col]
                matrix[r] = [a - factor * b for a, b in zip(matrix[r], matrix[col])]
    return [matrix[r][size] for r in range(size)]


def _endpoint_equations(sys: WindowSystem, choice: Dict[Letter, Tuple[AffineMap, AffineMap]]):
    f = sys.field
    zero = f.num(0)
    rows, rhs = [], []
    for letter in LETTERS:
        low_map, high_map = choice[letter]
        for upper, fmap in ((False, low_map), (True, high_map)):
            # lower end of the image comes from the source's lower end unless orientation flips
            flip = fmap.contraction_star.sign() < 0
            source_upper = upper != flip
            row = [zero] * 4
            row[_var(letter, upper)] = row[_var(letter, upper)] + 1
            row[_var(fmap.source_window, source_upper)] = (
                row[_var(fmap.source_window, source_upper)] - fmap.contraction_star)
            rows.append(row)
            rhs.append(fmap.translate_star)
    return rows, rhs


def _verify_tiling(sys: WindowSystem, ends: Dict[Letter, Tuple[QuadNum, QuadNum]]) -> Optional[str]:
    for letter in LETTERS:
        u, v = ends[letter]
        if v < u:
            return f"window {letter} has reversed endpoints"
        images = sorted((m.image(*ends[m.source_window]) for m in sys.by_target(letter)),
                        key=lambda img: (img[0], img[1]))
        if not images:
            return f"window {letter} has no maps"
        if images[0][0] != u or max(img[1] for img in images) != v:
            return f"images of window {letter} do not span [{u}, {v}]"
        for (lo1, hi1), (lo2, hi2) in zip(images, images[1:]):
            if lo2 > hi1:
                return f"gap ({hi1}, {lo2}) in window {letter}"
            if lo2 < hi1:
                return f"overlap ({lo2}, {hi1}) in window {letter}"
    return None


def _extremal_candidates(sys: WindowSystem, hulls: HullBounds, letter: Letter, upper: bool,
                         tolerance: Fraction) -> List[AffineMap]:
    scored = []
    for fmap in sys.by_target(letter):
        lo, hi = _map_interval(fmap, hulls.bounds[fmap.source_window])
        scored.append((hi if upper else lo, fmap))
    best = max(s for s, _ in scored) if upper else min(s for s, _ in scored)
    return [fmap for score, fmap in scored if abs(score - best) <= tolerance]


def solve_interval_fixed_point(sys: WindowSystem, hulls: Optional[HullBounds] = None) -> IntervalSolution:
    """Solve the window system exactly assuming both windows are intervals.

    Candidate endpoint systems are chosen from the maps that can realize the
    extreme endpoints of each hull; a solution is accepted only if the images
    tile each window exactly.
    """
    if any(not sys.by_target(letter) for letter in LETTERS):
        return IntervalSolution(success=False, error="a window has no maps")
    hulls = hulls or certified_hull(sys, Fraction(1, 10 ** 9))
    tolerance = max(8 * hulls.err, Fraction(1, 10 ** 9))
    options = {letter: list(product(_extremal_candidates(sys, hulls, letter, False, tolerance),
                                    _extremal_candidates(sys, hulls, letter, True, tolerance)))
               for letter in LETTERS}
    reason = "no candidate endpoint system"
    for choice_a, choice_b in product(options['a'], options['b']):
        rows, rhs = _endpoint_equations(sys, {'a': choice_a, 'b': choice_b})
        u_a, v_a, u_b, v_b = _solve_exact(rows, rhs)
        ends = {'a': (u_a, v_a), 'b': (u_b, v_b)}
        reason = _verify_tiling(sys, ends)
        if reason is None:
            windows = {letter: Interval(*ends[letter]) for letter in LETTERS}
            logger.debug(f"Interval windows: a={windows['a']}, b={windows['b']}")
            return IntervalSolution(success=True, windows=windows)
        logger.debug(f"Rejected interval candidate: {reason}")
    return IntervalSolution(success=False, error=reason)


def _round_out(lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    return (Fraction(floor(lo * HULL_GRID), HULL_GRID), Fraction(ceil(hi * HULL_GRID), HULL_GRID))


def _map_interval(fmap: AffineMap, box: Tuple[Fraction, Fraction]) -> Tuple[Fraction, Fraction]:
    c_lo, c_hi = fmap.contraction_star.enclosure(ENCLOSURE_EPS)
    t_lo, t_hi = fmap.translate_star.enclosure(ENCLOSURE_EPS)
    products = [c * w for c in (c_lo, c_hi) for w in box]
    return min(products) + t_lo, max(products) + t_hi


def certified_hull(sys: WindowSystem, eps: Union[float, Fraction]) -> HullBounds:
    """Outer interval hulls of the windows, within ``eps`` of the true hulls."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    c_lo, c_hi = sys.contraction.enclosure(ENCLOSURE_EPS)
    c = Fraction(ceil(max(abs(c_lo), abs(c_hi)) * 2 ** 20), 2 ** 20)
    if c >= 1:
        raise NotPisotUnit("Window system is not contractive")
    t_max = max(max(abs(x) for x in m.translate_star.enclosure(ENCLOSURE_EPS)) for m in sys.maps)
    radius = Fraction(ceil(t_max / (1 - c)) + 1)
    diam = 2 * radius
    steps, bound = 0, diam / (1 - c)
    while bound > eps:
        bound *= c
        steps += 1
    logger.debug(f"Certified hull: seed box ±{radius}, {steps} steps for eps={float(eps):.3g}")
    boxes = {letter: (-radius, radius) for letter in LETTERS}
    for _ in range(steps):
        updated = {}
        for letter in LETTERS:
            images = [_map_interval(m, boxes[m.source_window]) for m in sys.by_target(letter)]
            updated[letter] = _round_out(min(lo for lo, _ in images), max(hi for _, hi in images))
        boxes = updated
    return HullBounds(boxes, eps + Fraction(1, 2 ** 60))


def chaos_game(sys: WindowSystem, n: int, rng_seed: int, burn_in: int = DEFAULT_BURN_IN,
               streams: int = 1) -> PointCloud:
    """Random backward walk on the window system.

    Each stream runs ``n`` steps from 0 in window a and records every step after
    the first ``burn_in``. Streams use seeds spawned from ``rng_seed``.
    """
    if burn_in < 0 or n < burn_in:
        raise BadSampling(f"Need samples >= burn-in >= 0, got {n} samples and burn-in {burn_in}",
                          {'samples': n, 'burn_in': burn_in})
    if streams < 1:
        raise BadSampling(f"Need at least one stream, got {streams}", {'streams': streams})
    c = to_real(sys.contraction)
    moves = {j: [(LETTERS.index(m.target_window), to_real(m.translate_star)) for m in sys.by_source(j)]
             for j in LETTERS}
    by_label = [moves['a'], moves['b']]
    if streams == 1:
        generators = [np.random.default_rng(rng_seed)]
    else:
        generators = [np.random.default_rng(child)
                      for child in np.random.SeedSequence(rng_seed).spawn(streams)]

    recorded: List[List[float]] = [[], []]
    for rng in generators:
        draws = rng.random(n).tolist()
        label, p = 0, 0.0
        for k, u in enumerate(draws):
            options = by_label[label]
            label, t = options[int(u * len(options))]
            p = c * p + t
            if k >= burn_in:
                recorded[label].append(p)
    positions = {letter: np.array(recorded[k], dtype=np.float64) for k, letter in enumerate(LETTERS)}
    logger.debug(f"Chaos game: {len(recorded[0])} points in W_a, {len(recorded[1])} in W_b")
    return PointCloud(positions, seed=rng_seed, samples=n, burn_in=burn_in, streams=streams)


def cloud_within_hulls(cloud: PointCloud, hulls: HullBounds) -> bool:
    for letter in LETTERS:
        points = cloud.of(letter)
        if points.size == 0:
            continue
        lo, hi = (float(x) for x in hulls.widened(letter))
        if points.min() < lo or points.max() > hi:
            return False
    return True


def measure_estimate(cloud: PointCloud, h: float) -> Tuple[float, float]:
    """Box-counting measure of each window: occupied bins of width h, times h."""
    if h <= 0:
        raise ValueError("Bin width must be positive")
    estimates = []
    for letter in LETTERS:
        points = cloud.of(letter)
        estimates.append(float(np.unique(np.floor(points / h)).size * h) if points.size else 0.0)
    return estimates[0], estimates[1]


def measure_ratio(pf: PFData) -> QuadNum:
    """Exact μ_a / μ_b; the window measures form a right PF eigenvector."""
    return pf.right_vec[0] / pf.right_vec[1]


def gap_profile(cloud: PointCloud, resolution: float) -> List[Tuple[float, float]]:
    """Empty stretches of the union cloud longer than ``resolution``, longest first."""
    points = cloud.union()
    if points.size < 2:
        return []
    diffs = np.diff(points)
    indices = np.nonzero(diffs > resolution)[0]
    gaps = [(float(points[k]), float(points[k + 1])) for k in indices]
    gaps.sort(key=lambda gap: gap[0] - gap[1])
    return gaps


def one_sided_distance(points: np.ndarray, intervals: Sequence[Interval]) -> float:
    """sup over points of the distance to the union of ``intervals``."""
    if points.size == 0:
        return 0.0
    distance = np.full(points.shape, np.inf)
    for window in intervals:
        lo, hi = float(window.lo), float(window.hi)
        distance = np.minimum(distance, np.maximum(np.maximum(lo - points, points - hi), 0.0))
    return float(distance.max())
