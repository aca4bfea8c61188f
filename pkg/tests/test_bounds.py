import math

import pytest

from hamlow.bounds import (
    CSV_HEADER,
    beats_buhrman,
    binary_entropy,
    comparison_pivot,
    crossover_depth,
    crossover_diagnostic,
    emit_comparison_table,
    exponent_buhrman,
    exponent_buhrman_estimation,
    exponent_ours,
    plot_rows,
    rows_to_csv,
)
from hamlow.errors import InvalidParameterError

# (k, epsilon): (Buhrman, ours d=0, ours d=1), as printed to seven decimals
PRINTED = {
    (3, 0.125): (0.4897959, 0.4791143, 0.4882501),
    (3, 0.05): (0.4958678, 0.4902640, 0.4946104),
    (3, 0.01): (0.4991681, 0.4975686, 0.4986801),
    (3, 0.001): (0.4999167, 0.4996876, 0.4998334),
    (4, 0.125): (0.4923077, 0.4835214, 0.4907814),
    (4, 0.05): (0.4968944, 0.4923732, 0.4957955),
    (4, 0.01): (0.4993758, 0.4981115, 0.4989776),
    (4, 0.001): (0.4999375, 0.4997592, 0.4998718),
    (10, 0.125): (0.4968944, 0.4923732, 0.4957955),
    (10, 0.05): (0.4987531, 0.4965357, 0.4981115),
    (10, 0.01): (0.4997501, 0.4991620, 0.4995497),
    (10, 0.001): (0.4999750, 0.4998954, 0.4999446),
}


def test_binary_entropy_values():
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.125 / 12) == pytest.approx(0.0835428, abs=1e-6)
    assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8), abs=1e-15)


def test_binary_entropy_domain():
    with pytest.raises(InvalidParameterError):
        binary_entropy(1.5)
    with pytest.raises(InvalidParameterError):
        binary_entropy(-0.1)


def test_printed_table_reproduced():
    rows = emit_comparison_table()
    assert len(rows) == 24
    for row in rows:
        buhrman, ours_d0, ours_d1 = PRINTED[(row.k, row.epsilon)]
        assert row.c_buhrman == pytest.approx(buhrman, abs=1e-7)
        assert row.c_ours == pytest.approx(ours_d0 if row.d == 0 else ours_d1, abs=1e-7)


def test_pivot_has_one_row_per_k_epsilon():
    pivot = comparison_pivot(emit_comparison_table())
    assert len(pivot) == 12
    entry = pivot[0]
    assert (entry["k"], entry["epsilon"]) == (3, 0.125)
    assert entry["c_ours_d0"] == pytest.approx(0.4791143, abs=1e-7)
    assert entry["c_ours_d1"] == pytest.approx(0.4882501, abs=1e-7)


def test_single_row():
    (row,) = emit_comparison_table([4], [0.01], [1])
    assert row.c_ours == pytest.approx(0.4989776, abs=1e-7)


def test_empty_table():
    assert emit_comparison_table([], [], []) == []
    assert rows_to_csv([]).strip() == ",".join(CSV_HEADER)


def test_csv_header():
    lines = rows_to_csv(emit_comparison_table([3], [0.125], [0])).splitlines()
    assert lines[0] == "k,epsilon,d,c_buhrman,c_buhrman_est,c_ours"
    assert len(lines) == 2


def test_buhrman_estimation_variant():
    assert exponent_buhrman_estimation(3, 3) == pytest.approx(0.25)
    assert exponent_buhrman_estimation(3, 0.125) == pytest.approx(0.48)
    assert exponent_buhrman_estimation(3, 1e-9) == pytest.approx(0.5, abs=1e-9)
    for k in (1, 3, 10):
        for eps in (0.001, 0.1, 1.0):
            assert exponent_buhrman_estimation(k, eps) <= exponent_buhrman(k, eps)


def test_exponent_ours_regime():
    with pytest.raises(InvalidParameterError):
        exponent_ours(1, 3.0, 0)
    with pytest.raises(InvalidParameterError):
        exponent_ours(3, 0.0, 0)


def test_monotonicity():
    for k in (3, 4, 10):
        for eps in (0.125, 0.05, 0.01):
            values = [exponent_ours(k, eps, d) for d in range(5)]
            assert all(a < b for a, b in zip(values, values[1:]))
        by_eps = [exponent_ours(k, eps, 1) for eps in (0.001, 0.01, 0.05, 0.125)]
        assert all(a > b for a, b in zip(by_eps, by_eps[1:]))


def test_dominance_consistency():
    for row in emit_comparison_table():
        entropy_side = 0.5 * binary_entropy(row.epsilon / (2 ** (row.d + 2) * row.k))
        rational_side = row.epsilon / (2 * row.k + row.epsilon)
        assert (row.c_ours < row.c_buhrman) == (entropy_side > rational_side)


def test_default_grid_exponents_in_range():
    for row in emit_comparison_table():
        for value in (row.c_buhrman, row.c_buhrman_est, row.c_ours):
            assert 0 < value <= 0.5


@pytest.mark.parametrize("k, eps", [(3, 0.125), (10, 0.001)])
def test_crossover_depth(k, eps):
    d_max = crossover_depth(k, eps)
    assert d_max is not None and d_max >= 1
    assert beats_buhrman(k, eps, d_max)
    assert not beats_buhrman(k, eps, d_max + 1)


def test_crossover_none_outside_entropy_regime():
    # ε/(4k) = 3/4 is past 1/2 already at d = 0
    assert crossover_depth(1, 3.0) is None


def test_crossover_tie_counts_as_faster():
    # ε/(4k) = 1/2: ½H = ½ and ε/(2k+ε) = ½
    assert beats_buhrman(1, 2.0, 0)


def test_crossover_diagnostic():
    info = crossover_diagnostic(3, 0.125)
    assert info["d_max"] == crossover_depth(3, 0.125)
    assert info["log2_log2"] == pytest.approx(math.log2(math.log2(24)))


def test_plot_rows_header():
    lines = plot_rows([3], [0], [0.01, 0.1]).splitlines()
    assert lines[0] == "k,d,epsilon,c_ours,c_buhrman"
    assert len(lines) == 3
