import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodstate.errors import DomainError
from prodstate.geometry import (
    ADJOINED_MAX,
    LEMMAS,
    TETRA_EDGE,
    TETRA_MAX,
    TRIANGLE_MAX,
    InscribedSimplex,
    adjoined_triangle_optimum,
    check_lemma,
    edge_lengths,
    perimeter,
    squared_sum,
    star_deviation,
    star_deviation_bound,
    t_score,
)
from support import random_unit

TETRA = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)


def test_star_bound_examples():
    assert star_deviation_bound(0, 0.3) == 0
    assert star_deviation_bound(1, 0) == pytest.approx(2)
    assert star_deviation_bound(0.01, 0.5) == pytest.approx(0.2 * math.sqrt(5 / 3))
    with pytest.raises(DomainError):
        star_deviation_bound(0.1, 1.0)
    with pytest.raises(DomainError):
        star_deviation_bound(1.5, 0.0)


def test_perimeter_examples():
    ang = np.radians([90, 210, 330])
    tri = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    assert perimeter(InscribedSimplex(tri)) == pytest.approx(3 * math.sqrt(3))
    assert perimeter(InscribedSimplex(TETRA)) == pytest.approx(4 * math.sqrt(6))
    assert perimeter(np.tile([0, 0, 1.0], (4, 1))) == 0
    assert squared_sum(InscribedSimplex(TETRA)) == pytest.approx(16)
    assert TETRA_EDGE == pytest.approx(np.linalg.norm(TETRA[0] - TETRA[1]))


def test_simplex_validation():
    with pytest.raises(DomainError):
        InscribedSimplex(np.ones((3, 3)))
    with pytest.raises(DomainError):
        InscribedSimplex(np.eye(3)[:2])


def test_t_score_examples():
    assert t_score(math.sqrt(3)) == pytest.approx(9)
    assert t_score(4 / math.sqrt(6)) == pytest.approx((40 + 8 * math.sqrt(3)) / 6)
    assert t_score(0) == 8
    with pytest.raises(DomainError):
        t_score(2.1)


def test_t_score_scan():
    s = np.arange(0.0, 2.0 + 1e-12, 1e-5)
    s = s[s <= 2.0]
    vals = np.array([t_score(x) for x in s])
    rising = s <= math.sqrt(3)
    assert np.all(np.diff(vals[rising]) > 0)
    k = int(np.argmax(vals))
    assert abs(s[k] - math.sqrt(3)) <= 1e-5
    assert vals[k] == pytest.approx(9, abs=1e-9)


def test_t_score_is_the_best_apex():
    # squared-sum of the triangle (a, b, apex) maximized over apex on a dense circle grid
    for s in (0.3, 1.0, 4 / math.sqrt(6), math.sqrt(3), 1.95):
        half = math.asin(s / 2)
        a = np.array([math.sin(half), 0, math.cos(half)])
        b = np.array([-math.sin(half), 0, math.cos(half)])
        th = np.linspace(0, 2 * math.pi, 200001)
        apex = np.stack([np.sin(th), np.zeros_like(th), np.cos(th)], axis=1)
        tot = s**2 + np.sum((apex - a) ** 2, axis=1) + np.sum((apex - b) ** 2, axis=1)
        assert tot.max() == pytest.approx(t_score(s), abs=1e-8)


def test_random_triangles_and_tetrahedra_bounds(rng):
    tri = random_unit(rng, 3 * 100_000).reshape(-1, 3, 3)
    assert np.max(edge_lengths(tri).sum(axis=1)) <= TRIANGLE_MAX + 1e-9
    tet = random_unit(rng, 4 * 100_000).reshape(-1, 4, 3)
    assert np.max(edge_lengths(tet).sum(axis=1)) <= TETRA_MAX + 1e-9


@given(st.floats(0, 1), st.floats(0, 0.99))
def test_star_bound_monotone(eps, lam):
    assert star_deviation_bound(eps, lam) >= star_deviation_bound(eps, 0.0) - 1e-15
    assert star_deviation_bound(eps, lam) <= star_deviation_bound(1.0, lam) + 1e-15


def test_star_deviation_at_axis():
    dev, lam = star_deviation((1, 0.5, 0.2), np.array([1.0, 0, 0]))
    assert dev == 0 and lam == 0.5
    dev, lam = star_deviation((1, 1, 0.3), np.array([0.6, 0.8, 0]))
    assert dev == pytest.approx(0) and lam == 0.3


@pytest.mark.parametrize("lemma", ["A1star", "A2", "A4"])
def test_interval_and_star_lemmas(lemma):
    rep = check_lemma(lemma, samples=2000, seed=3)
    assert rep.ok and rep.samples == 2000 and rep.worst_margin >= 0


@pytest.mark.parametrize("lemma", ["A3", "A5"])
def test_rigidity_lemmas_report_fitted_constant(lemma):
    rep = check_lemma(lemma, samples=2000, seed=3)
    assert rep.ok
    assert 0 < rep.fitted_constant <= rep.params["c"]


def test_adjoined_optimum():
    value, s = adjoined_triangle_optimum()
    assert value == pytest.approx(ADJOINED_MAX, abs=1e-6)
    assert np.max(np.abs(s - TETRA_EDGE)) <= 1e-3
    assert check_lemma("A6max").ok


def test_adjoined_optimum_dense_grid():
    # two-parameter slice: one edge s, the rest share the remaining budget
    s = np.linspace(0.5, 2.0, 3001)
    rest = (TETRA_MAX - s) / 5
    vals = np.array([t_score(a) + 5 * t_score(b) for a, b in zip(s, rest) if b <= 2])
    assert vals.max() <= ADJOINED_MAX + 1e-9


def test_regular_tetrahedron_with_apexes_scores_adjoined_max():
    total = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            a, b = TETRA[i], TETRA[j]
            apex = -(a + b) / np.linalg.norm(a + b)
            total += np.sum((a - b) ** 2) + np.sum((apex - a) ** 2) + np.sum((apex - b) ** 2)
    assert total == pytest.approx(ADJOINED_MAX, abs=1e-9)


def test_unknown_lemma():
    with pytest.raises(DomainError):
        check_lemma("A9")
    assert set(LEMMAS) >= {"A2", "A3", "A4", "A5", "A6max"}


def test_reports_are_deterministic():
    assert check_lemma("A2", samples=500, seed=1).to_json() == check_lemma("A2", samples=500, seed=1).to_json()
