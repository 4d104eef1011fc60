import random

import numpy as np
import pytest

from hexwalk import cyclo
from hexwalk.cyclo import CycNum
from hexwalk.domains import explicit, plane, triangle
from hexwalk.enumerator import (
    COLLECT,
    PER_ENDPOINT,
    EnumerationError,
    EnumSpec,
    ResourceError,
    brute_force_walks,
    count_saws,
    count_saws_table,
    enumerate_walks,
    evaluate_histogram,
    parallel_enumerate,
)
from hexwalk.hexlattice import is_vertex

XC = cyclo.constant("x_c")


def random_box_domain(rng):
    x0, y0 = rng.randrange(-10, 10), rng.randrange(-12, 12)
    w, h = rng.randint(4, 10), rng.randint(6, 14)
    vs = [(x, y) for x in range(x0 - w, x0 + w + 1) for y in range(y0 - h, y0 + h + 1) if is_vertex(x, y)]
    return explicit(vs)


def collected(d, start, L):
    res = enumerate_walks(EnumSpec(d, start, L, accumulators=(COLLECT,)))
    return {tuple(w) for w in res.walks}


def test_brute_force_oracle_random_boxes():
    rng = random.Random(2024)
    for _ in range(20):
        d = random_box_domain(rng)
        start = rng.choice(d.mids())
        L = rng.randint(0, 8)
        assert collected(d, start, L) == brute_force_walks(start, L, d.contains)


def test_full_lattice_small_lengths():
    res = enumerate_walks(EnumSpec(plane(), (0, 0), 2))
    assert res.counts_by_length() == [1, 4, 8]
    assert brute_force_walks((0, 0), 2) == collected(plane(), (0, 0), 2)


def test_tria1_side_walks():
    d = triangle(0)
    spec = EnumSpec(d, (0, 0), 2, endpoint_filter=lambda m: m[1] == 3, accumulators=(PER_ENDPOINT, COLLECT))
    res = enumerate_walks(spec)
    side = [w for w in res.walks if w.end[1] == 3]
    assert len(side) == 2 and all(w.length == 1 for w in side)
    total = sum(res.per_endpoint().values(), CycNum(0))
    assert total == 2 * XC
    assert cyclo.constant("cos_pi_8") * total == CycNum(1)


def test_start_outside_domain():
    with pytest.raises(EnumerationError):
        EnumSpec(triangle(0), (5, 3), 3)


def test_count_saws():
    assert count_saws(0) == 1
    assert count_saws(1) == 4
    table = count_saws_table(8)
    for n in range(9):
        assert table[n] == sum(1 for w in brute_force_walks((0, 0), n) if len(w) == n + 1)
    with pytest.raises(ResourceError):
        count_saws(31)


def test_c_n_at_least_mu_n():
    mu = cyclo.constant("mu")
    for n, c in enumerate(count_saws_table(14)):
        assert cyclo.compare(CycNum(c), mu ** n) >= 0


def test_budget_exceeded():
    with pytest.raises(ResourceError):
        enumerate_walks(EnumSpec(plane(), (0, 0), 12, budget=100))


@pytest.mark.parametrize("workers", [1, 2, 4, 8])
def test_parallel_matches_serial(workers):
    spec = EnumSpec(triangle(2), (0, 0), 40, accumulators=(PER_ENDPOINT,))
    serial = enumerate_walks(spec)
    par = parallel_enumerate(spec, workers)
    assert np.array_equal(serial.hist, par.hist)
    assert serial.walks_visited == par.walks_visited
    assert serial.weight_sum() == par.weight_sum()


def test_evaluate_histogram_matches_direct_sum():
    # counts by (winding mod 48, length), evaluated directly in the field
    h = np.zeros((48, 4), np.int64)
    h[0, 0] = 1
    h[5, 1] = 3
    h[47, 3] = 2
    direct = CycNum(1) + 3 * cyclo.zeta(-25) * XC + 2 * cyclo.zeta(-5 * 47) * XC ** 3
    assert evaluate_histogram(h, XC, 5) == direct
    assert evaluate_histogram(h, XC) == CycNum(1) + 3 * XC + 2 * XC ** 3
