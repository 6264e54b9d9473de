import random
from fractions import Fraction

import numpy as np
import pytest

from cantorval.errors import DegenerateField, NonIntervalWindow, NotPrimitive, ResourceLimit
from cantorval.geometry import (
    ControlPoints,
    Interval,
    control_points,
    cut_and_project,
    displacement_matrix,
    natural_lengths,
    point_set_difference,
    tile_gaps,
    verify_self_similarity,
)
from cantorval.quadratic import pf_data
from cantorval.substitution import LETTERS, Substitution, iterate, seed_cycle, substitution_matrix


def test_fibonacci_lengths(fibonacci):
    tau = fibonacci.f.lam
    assert fibonacci.lengths.len_a == tau
    assert fibonacci.lengths.len_b == 1
    assert fibonacci.lengths.beta == tau


def test_silver_lengths(silver):
    assert silver.lengths.len_a == silver.num(-1, 1)
    assert silver.lengths.len_b == 1


def test_fibonacci_displacements(fibonacci):
    T = fibonacci.T
    assert T[('a', 'a')] == (fibonacci.num(0),)
    assert T[('b', 'a')] == (fibonacci.f.lam,)
    assert T[('a', 'b')] == (fibonacci.num(0),)
    assert T[('b', 'b')] == ()


def test_scrambled_displacements(scrambled):
    tau = scrambled.num(-1, 1)
    T = scrambled.T
    assert T[('a', 'a')] == (scrambled.num(0), tau)
    assert T[('b', 'a')] == (2 * tau,)
    assert T[('a', 'b')] == (scrambled.num(1),)
    assert T[('b', 'b')] == (scrambled.num(0),)


def test_displacement_counts_match_matrix():
    rng = random.Random(3)
    checked = 0
    while checked < 50:
        s = Substitution(''.join(rng.choice('ab') for _ in range(rng.randint(1, 6))),
                         ''.join(rng.choice('ab') for _ in range(rng.randint(1, 6))))
        try:
            lengths = natural_lengths(s)
        except (NotPrimitive, DegenerateField):
            continue
        T = displacement_matrix(s, lengths)
        m = substitution_matrix(s)
        for i in LETTERS:
            for j in LETTERS:
                assert len(T[(i, j)]) == m.entry(i, j)
        checked += 1


def test_one_sided_level_one(fibonacci):
    s = fibonacci.s
    patch = control_points(s, 1, seed_cycle(s), fibonacci.lengths, one_sided=True)
    assert patch.points_a == frozenset({fibonacci.num(0)})
    assert patch.points_b == frozenset({fibonacci.f.lam})


@pytest.mark.parametrize("name", ["fibonacci", "scrambled", "silver"])
def test_tiles_abut_on_level_eight(name, request):
    prepared = request.getfixturevalue(name)
    patch = control_points(prepared.s, 8, seed_cycle(prepared.s), prepared.lengths)
    gaps = tile_gaps(patch, prepared.lengths)
    assert gaps
    for x, letter, gap in gaps:
        assert gap == prepared.lengths.of(letter)
    assert len(patch) == len(patch.tiles)


def test_patch_is_centered(fibonacci):
    s = fibonacci.s
    patch = control_points(s, 4, seed_cycle(s), fibonacci.lengths)
    positions = [x for x, _ in patch.tiles]
    assert fibonacci.num(0) in positions
    last, letter = patch.tiles[positions.index(fibonacci.num(0)) - 1]
    assert last + fibonacci.lengths.of(letter) == 0


@pytest.mark.parametrize("name", ["fibonacci", "scrambled", "silver"])
def test_self_similarity_on_level_six(name, request):
    prepared = request.getfixturevalue(name)
    seed = seed_cycle(prepared.s)
    patch = control_points(prepared.s, 6, seed, prepared.lengths)
    source = control_points(prepared.s, 5, seed, prepared.lengths)
    report = verify_self_similarity(prepared.s, prepared.lengths, prepared.T, patch, source)
    assert report.success, report.counterexamples[:5]
    assert report.checked > 0


def test_self_similarity_needs_the_previous_level_for_period_two(fibonacci):
    s = fibonacci.s
    patch = control_points(s, 6, seed_cycle(s), fibonacci.lengths)
    report = verify_self_similarity(s, fibonacci.lengths, fibonacci.T, patch)
    assert report.failed
    assert report.counterexamples


def test_patch_size_cap(fibonacci):
    with pytest.raises(ResourceLimit):
        control_points(fibonacci.s, 30, seed_cycle(fibonacci.s), fibonacci.lengths, max_tiles=1000)


def test_negative_level(fibonacci):
    with pytest.raises(ValueError):
        control_points(fibonacci.s, -1, seed_cycle(fibonacci.s), fibonacci.lengths)


def fibonacci_windows(fibonacci):
    n = fibonacci.num
    return Interval(n(-2, 1), n(-1, 1)), Interval(n(-1), n(-2, 1))


def test_cut_and_project_matches_patch(fibonacci):
    Wa, Wb = fibonacci_windows(fibonacci)
    tau = fibonacci.f.lam
    model = cut_and_project(fibonacci.f, tau, Wa, Wb, 20)
    patch = control_points(fibonacci.s, 10, seed_cycle(fibonacci.s), fibonacci.lengths)
    differences = point_set_difference(model, patch, 20)
    # closed windows put one extra point on each window boundary
    assert differences['a'] == (frozenset({-1 - tau}), frozenset())
    assert differences['b'] == (frozenset({fibonacci.num(-1)}), frozenset())


def test_cut_and_project_membership(fibonacci):
    Wa, Wb = fibonacci_windows(fibonacci)
    model = cut_and_project(fibonacci.f, fibonacci.f.lam, Wa, Wb, 10)
    for letter, window in zip(LETTERS, (Wa, Wb)):
        for x in model.of(letter):
            assert window.contains(x.star())
            assert abs(x) <= 10


def test_cut_and_project_empty_window(fibonacci):
    model = cut_and_project(fibonacci.f, fibonacci.f.lam, None, None, 10)
    assert len(model) == 0


def test_cut_and_project_requires_intervals(fibonacci):
    with pytest.raises(NonIntervalWindow):
        cut_and_project(fibonacci.f, fibonacci.f.lam, [(0, 1)], None, 10)


@pytest.mark.parametrize("name", ["fibonacci", "scrambled", "silver"])
def test_control_points_lie_in_the_return_module(name, request):
    prepared = request.getfixturevalue(name)
    patch = control_points(prepared.s, 6, seed_cycle(prepared.s), prepared.lengths)
    beta = prepared.lengths.beta
    for letter in LETTERS:
        for x in patch.of(letter):
            m, n = x.coordinates(beta)
            assert m.denominator == 1 and n.denominator == 1
            assert beta * int(n) + int(m) == x


@pytest.mark.parametrize("name", ["fibonacci", "scrambled", "silver"])
@pytest.mark.parametrize("level", [1, 4, 7])
def test_patch_counts_are_matrix_power_columns(name, level, request):
    prepared = request.getfixturevalue(name)
    seed = seed_cycle(prepared.s)
    m = np.array([[prepared.m.entry(i, j) for j in LETTERS] for i in LETTERS])
    power = np.linalg.matrix_power(m, level)
    columns = [LETTERS.index(seed.left_seed), LETTERS.index(seed.right_seed)]
    patch = control_points(prepared.s, level, seed, prepared.lengths)
    assert len(patch.points_a) == power[0, columns].sum()
    assert len(patch.points_b) == power[1, columns].sum()
    one_sided = control_points(prepared.s, level, seed, prepared.lengths, one_sided=True)
    assert len(one_sided.points_a) == power[0, columns[1]]
    assert len(one_sided.points_b) == power[1, columns[1]]
    assert len(patch.tiles) == power[:, columns].sum()


def test_self_similarity_catches_a_corrupted_patch(fibonacci):
    s = fibonacci.s
    seed = seed_cycle(s)
    patch = control_points(s, 6, seed, fibonacci.lengths)
    source = control_points(s, 5, seed, fibonacci.lengths)
    origin = fibonacci.num(0)
    half = fibonacci.num(Fraction(1, 2))
    corrupted = ControlPoints(patch.points_a - {origin}, patch.points_b | {half}, patch.tiles)
    report = verify_self_similarity(s, fibonacci.lengths, fibonacci.T, corrupted, source)
    assert report.failed
    assert report.missing == [('a', origin)]
    assert report.extra == [('b', half)]
    assert verify_self_similarity(s, fibonacci.lengths, fibonacci.T, patch, source).success


def test_cut_and_project_small_radius(fibonacci):
    tau = fibonacci.f.lam
    _, Wb = fibonacci_windows(fibonacci)
    model = cut_and_project(fibonacci.f, tau, None, Wb, 3)
    assert model.points_a == frozenset()
    assert model.points_b == frozenset({-1 - tau, fibonacci.num(-1), tau})
    assert fibonacci.num(0) not in model.points_b
    assert fibonacci.num(1) not in model.points_b


@pytest.mark.parametrize("name", ["fibonacci", "scrambled", "silver"])
def test_letter_frequencies_approach_the_eigenvector(name, request):
    prepared = request.getfixturevalue(name)
    seed = seed_cycle(prepared.s)
    level = 0
    while len(iterate(prepared.s, seed.right_seed, level)) < 10_000:
        level += 1
    patch = control_points(prepared.s, level, seed, prepared.lengths, one_sided=True)
    ra, rb = pf_data(prepared.m).right_vec
    expected = float(ra / rb)
    assert len(patch.points_a) / len(patch.points_b) == pytest.approx(expected, rel=0.01)
