import math
from fractions import Fraction

import numpy as np
import pytest

from repsig.distributions import Rates
from repsig.failure_epochs import (
    epoch_mixture,
    epoch_survival,
    epoch_survival_table,
    epoch_weights,
)

from oracles import erlang_sum_sf_quadrature, pascal_row

RATE_GRID = [0.05, 0.1, 0.2]


def test_weights_first_epoch():
    assert epoch_weights(1) == (1.0,)


def test_weights_third_epoch():
    assert epoch_weights(3) == (0.25, 0.5, 0.25)


def test_weights_tenth_epoch():
    assert epoch_weights(10) == tuple(c / 512 for c in pascal_row(10))


@pytest.mark.parametrize("k", [0, -1, 2.5])
def test_weights_domain(k):
    with pytest.raises(ValueError):
        epoch_weights(k)


@pytest.mark.parametrize("k", [1, 2, 17, 200, 1100])
def test_weights_normalized(k):
    assert math.fsum(epoch_weights(k)) == pytest.approx(1.0, abs=1e-12)


def test_weights_pascal_recurrence_exact():
    prev = [Fraction(1)]
    for k in range(2, 31):
        row = [Fraction(c, 2 ** (k - 1)) for c in pascal_row(k)]
        conv = [(a + b) / 2 for a, b in zip([Fraction(0)] + prev, prev + [Fraction(0)])]
        assert row == conv
        assert list(epoch_weights(k)) == [float(v) for v in row]
        prev = row


def test_first_epoch_is_exponential():
    assert epoch_survival(1, Rates(0.1, 0.2), 1.0) == pytest.approx(0.904837, abs=5e-7)
    assert epoch_survival(1, Rates(0.1, 0.2), 1.0) == pytest.approx(math.exp(-0.1), abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 5, 12])
def test_epoch_at_zero(k):
    assert epoch_survival(k, Rates(0.3, 0.1), 0.0) == pytest.approx(1.0, abs=1e-15)


def test_second_epoch_example():
    oracle = 0.5 * math.exp(-0.1) + 0.5 * erlang_sum_sf_quadrature(2, 0.1, 1, 0.2, 1.0)
    assert oracle == pytest.approx(0.952268, abs=5e-7)
    assert epoch_survival(2, Rates(0.1, 0.2), 1.0) == pytest.approx(oracle, abs=1e-12)


def test_mixture_components():
    mix = epoch_mixture(3, Rates(0.1, 0.2))
    shapes = [(c.first.shape, c.second_shape) for c in mix.components]
    assert shapes == [(1, 0), (2, 1), (3, 2)]
    assert mix.weights == (0.25, 0.5, 0.25)


@pytest.mark.parametrize("lam", RATE_GRID)
@pytest.mark.parametrize("mu", RATE_GRID)
def test_monotone_in_t_and_k(lam, mu):
    grid = np.linspace(0.0, 80.0, 81)
    table = epoch_survival_table(12, Rates(lam, mu), grid)
    assert np.all(table[0] == pytest.approx(1.0, abs=1e-15))
    assert np.all(np.diff(table, axis=0) <= 1e-15)
    assert np.all(np.diff(table, axis=1) >= -1e-15)


def test_table_matches_pointwise():
    r = Rates(0.1, 0.2)
    grid = [0.0, 0.5, 3.0, 40.0]
    table = epoch_survival_table(6, r, grid)
    for i, t in enumerate(grid):
        for k in range(1, 7):
            assert table[i, k - 1] == pytest.approx(epoch_survival(k, r, t), abs=1e-15)


def test_table_empty_grid():
    assert epoch_survival_table(4, Rates(1.0, 1.0), []).shape == (0, 4)
