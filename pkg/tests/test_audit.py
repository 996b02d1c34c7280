from fractions import Fraction
import json

import pytest

from fairtoss.audit import (
    empirical_frequencies,
    exact_float_counts,
    exact_mod_counts,
    lucky_ratio,
    residue_fold,
)
from fairtoss.entropy import SeededBitSource, make_source
from fairtoss.numtheory import mersenne
from oracles import grid_counts


def test_float_counts_n3_b4():
    rep = exact_float_counts(3, 4)
    assert rep.counts == (6, 5, 5)
    assert rep.ratio == Fraction(6, 5)
    assert rep.lucky == (0,)


def test_float_counts_power_of_two():
    for k in range(0, 6):
        rep = exact_float_counts(2**k, 8)
        assert set(rep.counts) == {2 ** (8 - k)}
        assert rep.ratio == 1 and rep.lucky == ()


def test_float_counts_n12_b4():
    rep = exact_float_counts(12, 4)
    assert rep.counts == (2, 1, 1) * 4
    assert rep.ratio == 2
    assert rep.residue_pattern == (8, 4, 4)


@pytest.mark.parametrize("n,b,expected", [(3, 4, (6, 5, 5)), (5, 4, (4, 3, 3, 3, 3))])
def test_mod_counts(n, b, expected):
    rep = exact_mod_counts(n, b)
    assert rep.counts == expected
    assert rep.lucky == (0,)


def test_mod_counts_power_of_two():
    assert exact_mod_counts(8, 6).lucky == ()


def test_counts_match_grid_enumeration():
    for b in range(0, 11):
        for n in range(1, min(64, 2**b) + 1):
            assert list(exact_float_counts(n, b).counts) == grid_counts(n, b, "floor")
            assert list(exact_mod_counts(n, b).counts) == grid_counts(n, b, "mod")


def test_large_b_uses_exact_integers():
    rep = exact_float_counts(3, 64)
    assert sum(rep.counts) == 2**64
    assert rep.counts == ((2**64 + 2) // 3, (2**64 - 1) // 3, (2**64 - 1) // 3)


def test_rejects_n_above_grid():
    with pytest.raises(ValueError):
        exact_float_counts(17, 4)
    with pytest.raises(ValueError):
        exact_mod_counts(3, 1)


@pytest.mark.parametrize("a,k,b,expected", [(14, 2, 16, 2), (0, 2, 4, Fraction(6, 5)), (2, 2, 6, Fraction(6, 5))])
def test_lucky_ratio(a, k, b, expected):
    assert lucky_ratio(a, k, b) == expected
    assert exact_float_counts(2**a * mersenne(k), b).ratio == expected


def test_lucky_ratio_preconditions():
    for bad in [(0, 2, 5), (0, 1, 4), (3, 2, 4)]:
        with pytest.raises(ValueError):
            lucky_ratio(*bad)


def test_ratio_law_single_surplus_class():
    for b in range(2, 15):
        for k in range(2, b + 1):
            for a in range(0, b - k + 1):
                if (b - a) % k:
                    continue
                M = mersenne(k)
                rep = exact_float_counts(2**a * M, b)
                assert rep.ratio == lucky_ratio(a, k, b)
                fold = residue_fold(rep, M)
                assert fold.count(max(fold)) == 1


def test_residue_fold():
    rep = exact_float_counts(12, 4)
    assert residue_fold(rep, 3) == [8, 4, 4]
    assert residue_fold(rep, 1) == [16]
    uni = exact_float_counts(8, 6)
    assert len(set(residue_fold(uni, 4))) == 1


def test_odd_factor_means_unequal_counts():
    for b in range(2, 11):
        for n in range(3, 2**b + 1):
            if n & (n - 1) == 0:
                continue
            for rep in (exact_float_counts(n, b), exact_mod_counts(n, b)):
                assert max(rep.counts) > min(rep.counts)
                if n > 2 ** (b - 1):
                    assert (max(rep.counts), min(rep.counts)) == (2, 1)


def test_count_conservation():
    for n, b in [(7, 5), (100, 12), (3, 30), (1000, 40)]:
        assert sum(exact_float_counts(n, b).counts) == 2**b
        assert sum(exact_mod_counts(n, b).counts) == 2**b


def test_json_serialisation():
    d = json.loads(exact_float_counts(12, 4).to_json())
    assert d == {
        "n": 12, "b": 4, "mapping": "floor", "counts": [2, 1, 1] * 4,
        "lucky": [0, 3, 6, 9], "ratio_num": 2, "ratio_den": 1,
    }


def test_lottery_scale_ratio_two():
    n, b = 3 * 2**14, 16
    assert exact_float_counts(n, b).ratio == 2
    counts = grid_counts(n, b, "floor")
    assert max(counts) / min(counts) == 2


def test_empirical_optimal_uniform():
    rep = empirical_frequencies("optimal", 3, 30000, SeededBitSource(1))
    assert rep.passed and rep.dof == 2
    assert abs(rep.threshold - 13.815510557964274) < 1e-9


def test_empirical_mapping_against_prediction():
    rep = empirical_frequencies("floor", 12, 20000, SeededBitSource(2), b=4)
    assert rep.exact and rep.passed
    # a lucky-blind uniform test should flag the same data
    uniform = [rep.trials / 12] * 12
    from fairtoss.audit import chi_square

    assert chi_square(rep.histogram, uniform) > rep.threshold


def test_empirical_native_float_is_labelled():
    rep = empirical_frequencies("native-float", 12, 1000, SeededBitSource(2), b=4)
    assert not rep.exact


def test_empirical_replay():
    a = empirical_frequencies("optimal", 5, 500, make_source("seeded", 8))
    b = empirical_frequencies("optimal", 5, 500, make_source("seeded", 8))
    assert a.histogram == b.histogram
    s = "0110100111010001" * 20
    c = empirical_frequencies("optimal", 3, 20, make_source("scripted", s))
    d = empirical_frequencies("optimal", 3, 20, make_source("scripted", s))
    assert c.histogram == d.histogram


def test_empirical_unknown_scheme():
    with pytest.raises(ValueError):
        empirical_frequencies("dice", 3, 10, SeededBitSource(0))
