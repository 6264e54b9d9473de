from fractions import Fraction

import numpy as np
import pytest

from cantorval.errors import BadSampling, NotPisotUnit
from cantorval.geometry import Interval
from cantorval.quadratic import QuadField, pf_data, to_real
from cantorval.substitution import LETTERS
from cantorval.windows import (
    AffineMap,
    WindowSystem,
    build_window_system,
    certified_hull,
    chaos_game,
    cloud_within_hulls,
    gap_profile,
    measure_estimate,
    measure_ratio,
    one_sided_distance,
    solve_interval_fixed_point,
)


def test_map_counts_are_row_sums(scrambled):
    for letter in LETTERS:
        maps = scrambled.sys.by_target(letter)
        assert len(maps) == sum(scrambled.m.entry(letter, j) for j in LETTERS)
        for j in LETTERS:
            assert sum(1 for m in maps if m.source_window == j) == scrambled.m.entry(letter, j)


def test_fibonacci_system(fibonacci):
    lam_star = fibonacci.f.lam_star
    maps_a = fibonacci.sys.by_target('a')
    maps_b = fibonacci.sys.by_target('b')
    assert {(m.source_window, m.translate_star) for m in maps_a} == {('a', 0), ('b', 0)}
    # W_b = λ*·W_a + τ*, and τ* = 1 − τ = −τ⁻¹
    assert [(m.source_window, m.translate_star) for m in maps_b] == [('a', lam_star)]


def test_non_pisot_system_rejected():
    f = QuadField(3, -2)
    with pytest.raises(NotPisotUnit):
        build_window_system(None, f)


def test_fibonacci_interval_windows(fibonacci):
    solution = solve_interval_fixed_point(fibonacci.sys, fibonacci.hulls)
    assert solution.success
    n = fibonacci.num
    assert solution.windows['a'] == Interval(n(-2, 1), n(-1, 1))
    assert solution.windows['b'] == Interval(n(-1, 0), n(-2, 1))


def test_interval_solution_satisfies_the_equations(fibonacci):
    windows = solve_interval_fixed_point(fibonacci.sys).windows
    for letter in LETTERS:
        images = [m.image(windows[m.source_window].lo, windows[m.source_window].hi)
                  for m in fibonacci.sys.by_target(letter)]
        assert min(lo for lo, _ in images) == windows[letter].lo
        assert max(hi for _, hi in images) == windows[letter].hi


def test_scrambled_windows_are_not_intervals(scrambled):
    solution = solve_interval_fixed_point(scrambled.sys, scrambled.hulls)
    assert solution.failed
    assert solution.error


def test_single_map_fixed_point(fibonacci):
    lam_star = fibonacci.f.lam_star
    zero = fibonacci.num(0)
    sys = WindowSystem((AffineMap('a', 'a', zero, lam_star), AffineMap('b', 'b', zero, lam_star)),
                       fibonacci.f)
    solution = solve_interval_fixed_point(sys)
    assert solution.success
    assert solution.windows['a'] == Interval(zero, zero)


def test_window_with_exactly_one_map(fibonacci):
    lam_star = fibonacci.f.lam_star
    zero = fibonacci.num(0)
    # translate τ sits at τ* = λ* in internal space
    sys = WindowSystem((AffineMap('a', 'a', zero, lam_star), AffineMap('b', 'a', fibonacci.f.lam, lam_star)),
                       fibonacci.f)
    assert len(sys.by_target('a')) == 1
    solution = solve_interval_fixed_point(sys)
    assert solution.success
    assert solution.windows['a'] == Interval(zero, zero)
    assert solution.windows['b'] == Interval(lam_star, lam_star)
    lonely = solve_interval_fixed_point(WindowSystem((AffineMap('a', 'a', zero, lam_star),), fibonacci.f))
    assert not lonely.success
    assert lonely.error == "a window has no maps"


def test_contraction_is_checked(fibonacci):
    with pytest.raises(NotPisotUnit):
        AffineMap('a', 'a', fibonacci.num(0), fibonacci.f.lam)


def test_certified_hull_contains_fibonacci_windows(fibonacci):
    eps = Fraction(1, 10 ** 6)
    hulls = certified_hull(fibonacci.sys, eps)
    exact = {'a': (-2 + fibonacci.f.lam, -1 + fibonacci.f.lam), 'b': (fibonacci.num(-1), -2 + fibonacci.f.lam)}
    for letter, (lo, hi) in exact.items():
        h_lo, h_hi = hulls.bounds[letter]
        assert fibonacci.num(h_lo) <= lo and hi <= fibonacci.num(h_hi)
        assert float(lo) - float(h_lo) <= 1e-6
        assert float(h_hi) - float(hi) <= 1e-6


def test_scrambled_hulls(scrambled):
    hulls = scrambled.hulls
    tau = to_real(scrambled.num(-1, 1))
    assert [float(x) for x in hulls.bounds['a']] == pytest.approx([-1, 1], abs=1e-8)
    assert [float(x) for x in hulls.bounds['b']] == pytest.approx([-tau, 0], abs=1e-8)


def test_huge_eps_returns_seed_box(fibonacci):
    hulls = certified_hull(fibonacci.sys, 1000)
    lo, hi = hulls.bounds['a']
    assert lo == -hi
    assert hulls.bounds['a'] == hulls.bounds['b']


def test_chaos_game_is_deterministic(scrambled):
    first = chaos_game(scrambled.sys, 5000, rng_seed=42)
    second = chaos_game(scrambled.sys, 5000, rng_seed=42)
    other = chaos_game(scrambled.sys, 5000, rng_seed=43)
    for letter in LETTERS:
        assert np.array_equal(first.of(letter), second.of(letter))
    assert not np.array_equal(first.of('a'), other.of('a'))
    assert len(first) == 5000 - 100


def test_chaos_game_burn_in_edges(fibonacci):
    assert len(chaos_game(fibonacci.sys, 100, rng_seed=0, burn_in=100)) == 0
    with pytest.raises(BadSampling) as info:
        chaos_game(fibonacci.sys, 50, rng_seed=0, burn_in=100)
    assert info.value.exit_code == 2
    assert info.value.details == {'samples': 50, 'burn_in': 100}
    with pytest.raises(BadSampling):
        chaos_game(fibonacci.sys, 100, rng_seed=0, burn_in=-1)
    with pytest.raises(BadSampling):
        chaos_game(fibonacci.sys, 100, rng_seed=0, streams=0)


def test_chaos_game_golden_prefix(fibonacci):
    # default_rng(0) starts 0.637, 0.270, 0.041, 0.017, 0.813: moves b, a, a, a, b
    cloud = chaos_game(fibonacci.sys, 5, rng_seed=0, burn_in=0)
    c = fibonacci.f.lam_star
    assert cloud.of('a').tolist() == pytest.approx([to_real(c ** 2), to_real(c ** 3), to_real(c ** 4)], abs=1e-12)
    assert cloud.of('b').tolist() == pytest.approx([to_real(c), to_real(c + c ** 5)], abs=1e-12)


def test_chaos_game_streams(fibonacci):
    cloud = chaos_game(fibonacci.sys, 1000, rng_seed=1, streams=3)
    assert len(cloud) == 3 * 900
    again = chaos_game(fibonacci.sys, 1000, rng_seed=1, streams=3)
    assert np.array_equal(cloud.union(), again.union())


def test_fibonacci_cloud_fills_the_windows(fibonacci):
    cloud = chaos_game(fibonacci.sys, 100_000, rng_seed=0)
    windows = solve_interval_fixed_point(fibonacci.sys).windows
    for letter in LETTERS:
        assert one_sided_distance(cloud.of(letter), [windows[letter]]) < 1e-9
    assert one_sided_distance(cloud.union(), [windows['b'], windows['a']]) < 1e-3
    assert cloud_within_hulls(cloud, fibonacci.hulls)


def test_scrambled_cloud_within_hulls(scrambled):
    cloud = chaos_game(scrambled.sys, 100_000, rng_seed=0)
    assert cloud_within_hulls(cloud, certified_hull(scrambled.sys, Fraction(1, 10 ** 4)))


def test_exact_measure_ratio(fibonacci, scrambled):
    for prepared in (fibonacci, scrambled):
        ratio = measure_ratio(pf_data(prepared.m))
        tau = prepared.lengths.beta
        assert ratio == tau


def test_fibonacci_box_count_ratio(fibonacci):
    cloud = chaos_game(fibonacci.sys, 200_000, rng_seed=0)
    golden = to_real(fibonacci.f.lam)
    ratios = []
    for h in (1e-2, 5e-3):
        mu_a, mu_b = measure_estimate(cloud, h)
        ratios.append(mu_a / mu_b)
        assert mu_a / mu_b == pytest.approx(golden, rel=0.03)
    assert ratios[1] == pytest.approx(ratios[0], rel=0.02)


def test_scrambled_box_count_shrinks_with_bin_width(scrambled):
    cloud = chaos_game(scrambled.sys, 100_000, rng_seed=0)
    previous = measure_estimate(cloud, 1e-2)
    for h in (1e-2 / 2, 1e-2 / 4):
        current = measure_estimate(cloud, h)
        assert current[0] <= previous[0] + 1e-12
        assert current[1] <= previous[1] + 1e-12
        previous = current


def test_measure_estimate_of_empty_cloud(fibonacci):
    cloud = chaos_game(fibonacci.sys, 100, rng_seed=0)
    assert measure_estimate(cloud, 1e-3) == (0.0, 0.0)
    with pytest.raises(ValueError):
        measure_estimate(cloud, 0)


def test_fibonacci_union_has_no_gaps(fibonacci):
    cloud = chaos_game(fibonacci.sys, 100_000, rng_seed=0)
    assert gap_profile(cloud, 1e-2) == []


def test_scrambled_gaps_at_all_scales(scrambled):
    cloud = chaos_game(scrambled.sys, 200_000, rng_seed=0)
    counts = [len(gap_profile(cloud, r)) for r in (1e-1, 1e-2, 1e-3)]
    assert counts[0] < counts[1] < counts[2]
    gaps = gap_profile(cloud, 1e-2)
    lengths = [hi - lo for lo, hi in gaps]
    assert lengths == sorted(lengths, reverse=True)


def test_gap_profile_above_hull_length(scrambled):
    cloud = chaos_game(scrambled.sys, 10_000, rng_seed=0)
    assert gap_profile(cloud, 10.0) == []


@pytest.fixture(scope="module")
def full_size_clouds(fibonacci, scrambled):
    return {name: chaos_game(prepared.sys, 1_000_000, rng_seed=0)
            for name, prepared in (('fibonacci', fibonacci), ('scrambled', scrambled))}


@pytest.mark.slow
def test_fibonacci_measure_ratio_full_size(fibonacci, full_size_clouds):
    cloud = full_size_clouds['fibonacci']
    mu_a, mu_b = measure_estimate(cloud, 1e-3)
    assert mu_a / mu_b == pytest.approx(to_real(fibonacci.f.lam), rel=0.02)
    half_a, half_b = measure_estimate(cloud, 5e-4)
    assert half_a / half_b == pytest.approx(mu_a / mu_b, rel=0.02)
    assert gap_profile(cloud, 1e-2) == []


@pytest.mark.slow
def test_scrambled_gaps_full_size(full_size_clouds):
    cloud = full_size_clouds['scrambled']
    counts = [len(gap_profile(cloud, r)) for r in (1e-1, 1e-2, 1e-3)]
    assert counts[0] < counts[1] < counts[2]
    coarse, fine = measure_estimate(cloud, 1e-2), measure_estimate(cloud, 5e-3)
    assert fine[0] <= coarse[0] + 1e-12
    assert fine[1] <= coarse[1] + 1e-12
