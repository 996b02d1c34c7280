import math
from fractions import Fraction

import pytest

from fairtoss.analysis import (
    bounds,
    expectation,
    expectation_exact,
    expectation_odd_man_out,
    expectation_partition,
    expectation_rejection,
    expectation_residue,
    fermat_peak_value,
    fold_toss_recursion,
    no_decision_prob,
    peak_echoes,
    peak_location,
    peak_spec,
    peak_value,
    printed_mersenne_bound,
    printed_summary_bound,
    render_decimal,
    residue_profile,
    solve_rounds,
    termination_prob,
)
from fairtoss.entropy import SeededBitSource
from fairtoss.numtheory import fermat, mersenne
from fairtoss.sampler import draw_odd_man_out, draw_partition, enumerate_outcomes, draw_uniform
from oracles import markov_expectation


@pytest.mark.parametrize("n", list(range(1, 40)) + [45, 63, 65, 100, 127])
def test_expectation_matches_markov_chain(n):
    assert expectation(n) == markov_expectation(n)


@pytest.mark.parametrize("n,expected", [(3, Fraction(8, 3)), (5, Fraction(18, 5)), (6, Fraction(11, 3))])
def test_expectation_examples(n, expected):
    assert expectation_exact(n).e == expected


def test_alg1_registers_n5():
    state, rounds = solve_rounds(5)
    assert (state.f, state.g, state.h, state.r) == (48, 162, 3, 1)
    assert rounds == [(3, 3), (1, 1)]


def test_report_fields():
    rep = expectation_exact(12)
    assert rep.e == Fraction(14, 3)
    assert rep.T == 2
    assert rep.decimal == "4.666666666667"
    assert expectation_exact(1).e == 0
    assert expectation_exact(2).e == 1


def test_render_decimal_half_even():
    assert render_decimal(Fraction(1, 8), 2) == "0.12"
    assert render_decimal(Fraction(3, 8), 2) == "0.38"
    assert render_decimal(Fraction(8, 3)) == "2.666666666667"


def test_report_at_least_lower_bound():
    for n in range(1, 300):
        assert expectation(n) >= math.ceil(math.log2(n))


@pytest.mark.parametrize("n,cycles,expected", [(3, 1, Fraction(8, 3)), (5, 1, Fraction(18, 5)), (5, 2, Fraction(18, 5))])
def test_expectation_residue(n, cycles, expected):
    assert expectation_residue(n, cycles) == expected


def test_residue_formula_by_fraction_sum():
    # literal evaluation of the residue formula with fractions
    for n in (3, 5, 7, 9, 11, 13, 15, 21, 25):
        for cycles in (1, 3):
            T = cycles * next(t for t in range(1, n) if pow(2, t, n) == 1)
            s = sum(Fraction(pow(2, i, n), 2**i) for i in range(T))
            assert expectation_residue(n, cycles) == Fraction(2**T, 2**T - 1) * s


@pytest.mark.parametrize("n,t,expected", [(3, 2, Fraction(1, 4)), (5, 0, 1), (7, 0, 1), (5, 3, Fraction(3, 8))])
def test_no_decision(n, t, expected):
    assert no_decision_prob(n, t) == expected


@pytest.mark.parametrize("n,t,expected", [(3, 2, Fraction(3, 4)), (5, 4, Fraction(5, 16))])
def test_termination(n, t, expected):
    assert termination_prob(n, t) == expected


def test_termination_sums_to_one():
    for n in (3, 5, 7, 11):
        for t in (1, 5, 20):
            partial = sum(termination_prob(n, i) for i in range(1, t + 1))
            assert partial + no_decision_prob(n, t) == 1


@pytest.mark.parametrize("n", [3, 5, 6, 7, 11])
def test_enumerated_masses(n):
    en = enumerate_outcomes(lambda s: draw_uniform(n, s), 16)
    assert Fraction(en.undecided, 2**16) == no_decision_prob(n, 16)
    for t in range(1, 17):
        assert Fraction(en.stopped[t], 2**16) == termination_prob(n, t)


def test_residue_profile():
    assert residue_profile(5).residues == (1, 2, 4, 3)
    p = residue_profile(3)
    assert p.continue_probs == (1, Fraction(1, 4))
    assert fold_toss_recursion(p) == Fraction(8, 3)
    for n in range(3, 200, 2):
        prof = residue_profile(n)
        assert all(0 < q <= 1 for q in prof.continue_probs)
        assert fold_toss_recursion(prof) == expectation(n)


@pytest.mark.parametrize("s,k,expected", [(2, 1, 13), (2, 2, 205), (1, 1, 3), (1, 3, 43)])
def test_peak_location(s, k, expected):
    assert peak_location(s, k) == expected


@pytest.mark.parametrize(
    "s,k,expected",
    [(1, 1, Fraction(8, 3)), (1, 2, Fraction(160, 33)), (2, 1, Fraction(306, 65))],
)
def test_peak_value(s, k, expected):
    assert peak_value(s, k) == expected
    assert expectation(peak_location(s, k)) == expected


def test_peak_value_matches_j_form():
    J = lambda s, j: Fraction(s * j * 2 ** (s * j), fermat(s * j))  # noqa: E731
    for s in range(1, 5):
        for k in range(1, 5):
            assert peak_value(s, k) == J(s, 2 * k + 1) - J(s, 1) + Fraction(2, fermat(s))


def test_peak_spec_epoch():
    for s in range(1, 4):
        for k in range(1, 4):
            p = peak_spec(s, k)
            assert p.epoch == 2 * s * k
            assert fermat(s * (2 * k + 1)) == p.location * fermat(s)


def test_peak_echoes():
    assert peak_echoes(2, 1, 9) == [1, 2, 4, 7, 13, 26, 52, 103, 205]
    assert peak_echoes(1, 1, 7) == [1, 2, 3, 6, 11, 22, 43]
    for s in (1, 2, 3):
        seq = peak_echoes(s, 1, 2 * s * 4 + 1)
        assert seq[:: 2 * s] == [peak_location(s, k) for k in range(5)]
    assert peak_echoes(2, 13, 5) == [13, 26, 52, 103, 205]
    with pytest.raises(ValueError):
        peak_echoes(2, 12, 3)


@pytest.mark.parametrize("m,expected", [(1, Fraction(8, 3)), (2, Fraction(18, 5)), (4, Fraction(98, 17))])
def test_fermat_peak_value(m, expected):
    assert fermat_peak_value(m) == expected == expectation(fermat(m))


def test_fermat_numbers_make_the_largest_jump():
    # biggest rise e[n] - e[n-1] inside the epoch (2^m, 2^(m+1)] is at F_m
    for m in range(1, 12):
        epoch = range(2**m + 1, 2 ** (m + 1) + 1)
        jumps = {n: expectation(n) - expectation(n - 1) for n in epoch}
        best = max(jumps.values())
        assert [n for n, j in jumps.items() if j == best] == [fermat(m)]


def test_fermat_residue_jump_is_maximal():
    for k in range(2, 10):
        n = fermat(k)
        assert pow(2, k, n) - pow(2, k, n - 1) == n - 1


def test_bounds_examples():
    b = bounds(5)
    assert b.upper_sharp_discrete == Fraction(11, 3) == expectation(6)
    assert b.lower_discrete == 3 and b.upper_loose == 4
    assert math.isclose(b.upper_continuous, 3.6, abs_tol=1e-12)
    assert bounds(11).upper_sharp_discrete == Fraction(160, 33) == expectation(11)


def test_printed_bounds_are_valid_but_weaker():
    for n in range(2, 1025):
        e, sharp = expectation(n), bounds(n).upper_sharp_discrete
        assert e <= sharp <= printed_mersenne_bound(n)
        assert sharp <= printed_summary_bound(n)


def test_mersenne_closed_form():
    for m in range(2, 21):
        assert expectation(mersenne(m)) == Fraction(m * 2**m, mersenne(m))


def test_doubling():
    for n in range(1, 1025):
        assert expectation(2 * n) == 1 + expectation(n)


@pytest.mark.parametrize("n,expected", [(3, 3), (4, 2), (5, 4), (1, 0), (2, 1), (6, 4)])
def test_expectation_partition(n, expected):
    assert expectation_partition(n) == expected


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 8, 16, 6, 10, 12, 20, 24, 40])
def test_partition_formula_against_enumeration(n):
    # every interval still straddling a boundary at the cutoff needs 2 more
    # tosses on average, so head + tail is exact
    depth = 24
    en = enumerate_outcomes(lambda s: draw_partition(n, s), depth)
    head = sum(Fraction(t * w, 2**depth) for t, w in en.stopped.items())
    tail_mass = Fraction(en.undecided, 2**depth)
    assert expectation_partition(n) == head + tail_mass * (depth + 2)


def test_expectation_odd_man_out():
    assert [expectation_odd_man_out(n) for n in (3, 4, 5)] == [4, 8, 16]
    with pytest.raises(ValueError):
        expectation_odd_man_out(2)


def test_odd_man_out_simulation():
    src = SeededBitSource(5)
    mean = sum(draw_odd_man_out(5, src).bits_used for _ in range(10**5)) / 10**5
    assert abs(mean - 16) / 16 < 0.03


@pytest.mark.parametrize(
    "n,b,rounds,tosses",
    [(4, 4, 1, 4), (3, 4, Fraction(16, 15), Fraction(64, 15)), (9, 4, Fraction(16, 9), Fraction(64, 9))],
)
def test_expectation_rejection(n, b, rounds, tosses):
    assert expectation_rejection(n, b) == (rounds, tosses)


def test_rejection_at_fermat():
    for b in range(3, 12):
        _, tosses = expectation_rejection(fermat(b - 1), b)
        assert tosses == 2 * b * (1 - Fraction(1, fermat(b - 1)))
        _, t3 = expectation_rejection(3, b)
        assert t3 == Fraction(b * 2**b, 2**b - (2**b) % 3)
