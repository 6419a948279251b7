"""Tests for coherent-bus overlaps, capacity bounds, and sweeps."""

import cmath
import math

import pytest

from qubus.cvbus import (
    CoherentBusSpec,
    SWEEP_CSV_HEADER,
    coherent_overlap,
    max_dimension,
    qubit_capacity,
    rotate_label,
    sweep,
    sweep_csv,
)
from qubus.perms import build_shift_sets


def series_overlap(alpha, theta_from, theta_to, terms=80):
    """Number-basis series for the inner product of two coherent states of
    equal amplitude: exp(-a^2) * sum_n (a^2 e^{i dtheta})^n / n!."""
    z = alpha**2 * cmath.exp(1j * (theta_to - theta_from))
    total = 0j
    term = 1.0 + 0j
    for n in range(terms):
        total += term
        term *= z / (n + 1)
    return cmath.exp(-(alpha**2)) * total


def test_coherent_overlap_matches_number_basis_series():
    for alpha in (0.3, 1.0, 2.5):
        for D in (2, 5, 9):
            for n in range(D):
                got = coherent_overlap(alpha, 0, n, D)
                want = series_overlap(alpha, 0.0, 2.0 * math.pi * n / D)
                assert abs(got - want) <= 1e-10


def test_coherent_overlap_basic_properties():
    assert abs(coherent_overlap(1.0, 3, 3, 9) - 1.0) <= 1e-12
    forward = coherent_overlap(1.5, 0, 1, 7)
    backward = coherent_overlap(1.5, 1, 0, 7)
    assert abs(forward - backward.conjugate()) <= 1e-12
    with pytest.raises(ValueError):
        coherent_overlap(0.0, 0, 1, 4)
    with pytest.raises(ValueError):
        coherent_overlap(1.0, 0, 4, 4)


def test_rotate_label_matches_shift_set_action():
    sets = build_shift_sets(3, 2)
    x1 = sets[0].members[1]
    x3 = sets[1].members[1]
    for n in range(9):
        assert rotate_label(n, 1, 1, 9) == x1(n)
        assert rotate_label(n, 1, 3, 9) == x3(n)
        assert rotate_label(n, 2, 3, 9) == x3(x3(n))
    with pytest.raises(ValueError):
        rotate_label(9, 1, 1, 9)
    with pytest.raises(ValueError):
        rotate_label(0, -1, 1, 9)


def test_coherent_bus_spec_theta():
    spec = CoherentBusSpec(alpha=2.0, dimension=8)
    assert abs(spec.theta - math.pi / 4) <= 1e-12
    with pytest.raises(ValueError):
        CoherentBusSpec(alpha=0.0, dimension=8)
    with pytest.raises(ValueError):
        CoherentBusSpec(alpha=1.0, dimension=0)


def test_max_dimension_reference_point():
    bound = max_dimension(100.0, 1e-5)
    assert bound.d_max == 130
    assert bound.qubit_capacity == 7
    assert abs(bound.theta - math.acos(math.log(1e-5) / 1e4 + 1.0)) <= 1e-15
    assert abs(bound.d_max_real - 2.0 * math.pi / bound.theta) <= 1e-9
    assert math.floor(bound.d_max_real) == bound.d_max


def test_max_dimension_overlap_is_tight():
    for alpha in (2.0, 5.0, 20.0, 100.0):
        for epsilon in (1e-2, 1e-4, 1e-6):
            bound = max_dimension(alpha, epsilon)
            if bound.d_max < 2:
                continue
            at_bound = abs(coherent_overlap(alpha, 0, 1, bound.d_max))
            beyond = abs(coherent_overlap(alpha, 0, 1, bound.d_max + 1))
            assert at_bound <= epsilon + 1e-10
            assert beyond > epsilon - 1e-10


def test_max_dimension_capacity_one_row():
    bound = max_dimension(0.1, 0.5)
    assert bound.d_max == 1
    assert bound.qubit_capacity == 0
    assert math.isnan(bound.theta)
    assert math.isnan(bound.d_max_real)


def test_max_dimension_monotonicity():
    epsilon = 1e-4
    dims = [max_dimension(alpha, epsilon).d_max for alpha in (5, 10, 20, 40, 80)]
    assert dims == sorted(dims)
    alpha = 50.0
    dims_eps = [max_dimension(alpha, eps).d_max for eps in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert dims_eps == sorted(dims_eps, reverse=True)


def test_max_dimension_validates_inputs():
    with pytest.raises(ValueError):
        max_dimension(-1.0, 0.1)
    with pytest.raises(ValueError):
        max_dimension(1.0, 0.0)
    with pytest.raises(ValueError):
        max_dimension(1.0, 1.0)


def test_qubit_capacity_wrapper():
    assert qubit_capacity(100.0, 1e-5) == 7
    assert qubit_capacity(0.1, 0.5) == 0


def test_sweep_order_and_csv():
    bounds = sweep((5.0, 10.0), (1e-2, 1e-3))
    assert [(b.alpha, b.epsilon) for b in bounds] == [
        (5.0, 0.01),
        (10.0, 0.01),
        (5.0, 0.001),
        (10.0, 0.001),
    ]
    text = sweep_csv(bounds)
    lines = text.strip().split("\n")
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "5"
    assert first[1] == "0.01"
    assert first[4] == str(bounds[0].d_max)
    with pytest.raises(ValueError):
        sweep((), (1e-2,))


def test_sweep_csv_renders_nan_rows():
    text = sweep_csv([max_dimension(0.1, 0.5)])
    row = text.strip().split("\n")[1]
    assert row == "0.1,0.5,nan,nan,1,0"
