"""Inflation geometry: tile lengths, relative tile positions and control points."""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from loguru import logger

from .errors import NonIntervalWindow, ResourceLimit
from .quadratic import QuadField, QuadNum, pf_data
from .substitution import (
    LETTERS,
    Letter,
    SeedCycle,
    Substitution,
    iterate,
    substitution_matrix,
)

DEFAULT_MAX_PATCH_TILES = 2_000_000


@dataclass(frozen=True)
class TileLengths:
    len_a: QuadNum
    len_b: QuadNum

    def __post_init__(self):
        if self.len_a.sign() <= 0 or self.len_b.sign() <= 0:
            raise ValueError("Tile lengths must be positive")

    def of(self, letter: Letter) -> QuadNum:
        return self.len_a if letter == 'a' else self.len_b

    @property
    def field(self) -> QuadField:
        return self.len_a.field

    @property
    def beta(self) -> QuadNum:
        """The irrational length; Z[β] = Z + Zβ is the return module."""
        return self.len_b if self.len_a == 1 else self.len_a

    @property
    def longest(self) -> QuadNum:
        return max(self.len_a, self.len_b)


@dataclass(frozen=True)
class DisplacementMatrix:
    entries: Dict[Tuple[Letter, Letter], Tuple[QuadNum, ...]]

    def __getitem__(self, key: Tuple[Letter, Letter]) -> Tuple[QuadNum, ...]:
        return self.entries.get(key, ())

    def pieces(self, i: Letter) -> List[Tuple[Letter, QuadNum]]:
        """All (j, t) with t in T_ij, i.e. the tiles of type i inside any supertile."""
        return [(j, t) for j in LETTERS for t in self[(i, j)]]


@dataclass(frozen=True)
class Interval:
    lo: QuadNum
    hi: QuadNum

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"Empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: QuadNum) -> bool:
        return self.lo <= x <= self.hi

    @property
    def length(self) -> QuadNum:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class ControlPoints:
    points_a: FrozenSet[QuadNum]
    points_b: FrozenSet[QuadNum]
    # left endpoints in increasing order with their tile type; empty for model sets
    tiles: Tuple[Tuple[QuadNum, Letter], ...] = field(default=(), compare=False)

    def of(self, letter: Letter) -> FrozenSet[QuadNum]:
        return self.points_a if letter == 'a' else self.points_b

    def __len__(self) -> int:
        return len(self.points_a) + len(self.points_b)

    def restricted(self, radius: Union[int, Fraction]) -> 'ControlPoints':
        def keep(points: FrozenSet[QuadNum]) -> FrozenSet[QuadNum]:
            return frozenset(x for x in points if abs(x) <= radius)
        return ControlPoints(keep(self.points_a), keep(self.points_b))

    def rows(self) -> List[Tuple[QuadNum, Letter]]:
        if self.tiles:
            return list(self.tiles)
        rows = [(x, letter) for letter in LETTERS for x in self.of(letter)]
        rows.sort(key=lambda row: (float(row[0]), row[1]))
        return rows


@dataclass
class SelfSimilarityReport:
    """Outcome of checking Λ_i = ⋃_j ⋃_{t ∈ T_ij} (λΛ_j + t) on a patch."""
    success: bool
    checked: int = 0
    missing: List[Tuple[Letter, QuadNum]] = field(default_factory=list)
    extra: List[Tuple[Letter, QuadNum]] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return not self.success

    @property
    def counterexamples(self) -> List[Tuple[Letter, QuadNum]]:
        return self.missing + self.extra


def natural_lengths(s: Substitution) -> TileLengths:
    pf = pf_data(substitution_matrix(s))
    return TileLengths(*pf.left_vec)


def displacement_matrix(s: Substitution, lengths: TileLengths) -> DisplacementMatrix:
    entries: Dict[Tuple[Letter, Letter], List[QuadNum]] = {(i, j): [] for i in LETTERS for j in LETTERS}
    for j in LETTERS:
        position = lengths.field.num(0)
        for letter in s.image(j):
            entries[(letter, j)].append(position)
            position = position + lengths.of(letter)
    return DisplacementMatrix({key: tuple(sorted(values)) for key, values in entries.items()})


def _lay_out(word: str, lengths: TileLengths, leftwards: bool) -> List[Tuple[QuadNum, Letter]]:
    position = lengths.field.num(0)
    tiles = []
    if leftwards:
        for letter in reversed(word):
            position = position - lengths.of(letter)
            tiles.append((position, letter))
        tiles.reverse()
    else:
        for letter in word:
            tiles.append((position, letter))
            position = position + lengths.of(letter)
    return tiles


def control_points(s: Substitution, level: int, seed: SeedCycle,
                   lengths: Optional[TileLengths] = None, one_sided: bool = False,
                   max_tiles: int = DEFAULT_MAX_PATCH_TILES) -> ControlPoints:
    """Left endpoints of the level-``level`` patch grown from ``seed`` about 0.

    The right seed tile starts at the origin; unless ``one_sided`` the left
    seed tile ends there.
    """
    if level < 0:
        raise ValueError("Patch level must be nonnegative")
    lengths = lengths or natural_lengths(s)
    try:
        right = iterate(s, seed.right_seed, level, max_length=max_tiles)
        left = '' if one_sided else iterate(s, seed.left_seed, level, max_length=max_tiles)
    except ResourceLimit as e:
        raise ResourceLimit(f"Level-{level} patch exceeds {max_tiles} tiles", e.details)
    if len(left) + len(right) > max_tiles:
        raise ResourceLimit(f"Level-{level} patch exceeds {max_tiles} tiles",
                            {'tiles': len(left) + len(right), 'cap': max_tiles})
    tiles = _lay_out(left, lengths, leftwards=True) + _lay_out(right, lengths, leftwards=False)
    logger.debug(f"Level-{level} patch of {s} has {len(tiles)} tiles")
    return ControlPoints(
        frozenset(x for x, letter in tiles if letter == 'a'),
        frozenset(x for x, letter in tiles if letter == 'b'),
        tuple(tiles),
    )


def _floor(x: QuadNum) -> int:
    return floor(x.enclosure(Fraction(1, 2))[0])


def _ceil(x: QuadNum) -> int:
    return ceil(x.enclosure(Fraction(1, 2))[1])


def cut_and_project(f: QuadField, beta: QuadNum, Wa: Optional[Interval], Wb: Optional[Interval],
                    R: Union[int, Fraction]) -> ControlPoints:
    """Model set {x = m + nβ : |x| ≤ R, x* ∈ W_i} for interval windows (None = empty).

    The (m, n) search box comes from rational enclosures of exact bounds and
    every candidate is tested exactly.
    """
    windows = {'a': Wa, 'b': Wb}
    for letter, window in windows.items():
        if window is not None and not isinstance(window, Interval):
            raise NonIntervalWindow(f"Window {letter} is not an interval", {'window': letter})
    present = [w for w in windows.values() if w is not None]
    if not present:
        return ControlPoints(frozenset(), frozenset())
    R = f.num(Fraction(R))
    lo = min(w.lo for w in present) - 1
    hi = max(w.hi for w in present) + 1
    beta_star = beta.star()
    spread = beta - beta_star
    # x − x* = n(β − β*) bounds n; then each linear form bounds m
    n_ends = ((-R - hi) / spread, (R - lo) / spread)
    found: Dict[Letter, set] = {'a': set(), 'b': set()}
    for n in range(_floor(min(n_ends)), _ceil(max(n_ends)) + 1):
        m_lo = max(-R - beta * n, lo - beta_star * n)
        m_hi = min(R - beta * n, hi - beta_star * n)
        for m in range(_floor(m_lo), _ceil(m_hi) + 1):
            x = beta * n + m
            if abs(x) > R:
                continue
            x_star = x.star()
            for letter, window in windows.items():
                if window is not None and window.contains(x_star):
                    found[letter].add(x)
    return ControlPoints(frozenset(found['a']), frozenset(found['b']))


def point_set_difference(first: ControlPoints, second: ControlPoints, radius: Union[int, Fraction]
                         ) -> Dict[Letter, Tuple[FrozenSet[QuadNum], FrozenSet[QuadNum]]]:
    """Per window: (only in first, only in second), both restricted to |x| ≤ radius."""
    first, second = first.restricted(radius), second.restricted(radius)
    return {letter: (first.of(letter) - second.of(letter), second.of(letter) - first.of(letter))
            for letter in LETTERS}


def _support(points: Iterable[Tuple[QuadNum, Letter]], lengths: TileLengths) -> Tuple[QuadNum, QuadNum]:
    points = list(points)
    lo = min(x for x, _ in points)
    hi = max(x + lengths.of(letter) for x, letter in points)
    return lo, hi


def verify_self_similarity(s: Substitution, lengths: TileLengths, T: DisplacementMatrix,
                           patch: ControlPoints, source: Optional[ControlPoints] = None
                           ) -> SelfSimilarityReport:
    """Compare Λ_i with ⋃_j ⋃_{t ∈ T_ij} (λΛ_j + t) away from the patch border.

    ``source`` is the patch that gets inflated; it defaults to ``patch`` itself,
    which is right for seeds fixed under one application of the substitution.
    """
    source = source if source is not None else patch
    entries = [(x, letter) for letter in LETTERS for x in patch.of(letter)]
    if not entries:
        return SelfSimilarityReport(success=True)
    lam = lengths.field.lam
    lo, hi = _support(entries, lengths)
    margin = lam * lengths.longest
    lo, hi = lo + margin, hi - margin

    def inside(x: QuadNum) -> bool:
        return lo <= x <= hi

    report = SelfSimilarityReport(success=True)
    for i in LETTERS:
        inflated = {lam * y + t for j, t in T.pieces(i) for y in source.of(j)}
        actual = {x for x in patch.of(i) if inside(x)}
        expected = {x for x in inflated if inside(x)}
        report.checked += len(actual)
        report.missing.extend((i, x) for x in sorted(expected - actual))
        report.extra.extend((i, x) for x in sorted(actual - expected))
    report.success = not report.counterexamples
    if report.failed:
        logger.warning(f"Self-similarity of {s} fails at {len(report.counterexamples)} points")
    return report


def tile_gaps(patch: ControlPoints, lengths: TileLengths) -> List[Tuple[QuadNum, Letter, QuadNum]]:
    """(position, type, gap to the next control point) for every tile but the last."""
    tiles = patch.tiles or tuple(patch.rows())
    return [(x, letter, tiles[k + 1][0] - x) for k, (x, letter) in enumerate(tiles[:-1])]
