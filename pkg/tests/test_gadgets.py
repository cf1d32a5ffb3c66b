import json
import math

import numpy as np
import pytest

from prodstate import graph as gr
from prodstate.errors import DegenerateWeights, DomainError, ImproperColoring, NotAntisymmetric, NotSymmetric, OneLocal
from prodstate.gadgets import (
    SQRT3,
    SQRT6,
    ReductionArtifact,
    antisym_gadget_hamiltonian,
    decode_coloring,
    decode_cut,
    encode_coloring,
    encode_cut,
    gadget_ancilla_optimum,
    gadget_vertex_minimum,
    maxcut_to_wmc,
    same_up_to_permutation,
    sym_gadget_hamiltonian,
    threecolor_to_mc3,
    threecolor_to_wmc_equal,
    threecolor_to_wmc_twomax,
)
from prodstate.graph import Graph
from prodstate.hamiltonian import product_energy
from prodstate.oracle import OracleBudget, Wmc, brute_3coloring, brute_maxcut, grid_search_vectors
from prodstate.objectives import WeightMatrix, wmc_value
from prodstate.solvers import multi_restart
from support import COLORABLE, PAULIS, grid_ancilla_min, polar_grid, random_unit

I, X, Y, Z = PAULIS
HEIS = np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z)
ANTI = np.kron(X, Z) - np.kron(Z, X)
EDGE = gr.path(2)
THREECOL = {
    "3col-wmc-eq": threecolor_to_wmc_equal,
    "3col-wmc-2max": lambda g: threecolor_to_wmc_twomax(g, k_override=3),
    "3col-mc3": threecolor_to_mc3,
}
GRID5 = polar_grid(5.0)


# -- Hamiltonian gadgets -----------------------------------------------------


def test_antisym_single_edge_example():
    art = antisym_gadget_hamiltonian(ANTI, EDGE)
    ri, rj = [1, 0, 0], [-1, 0, 0]
    assert gadget_vertex_minimum(art, [ri, rj]) == pytest.approx(-2)
    assert grid_ancilla_min(art.output, ri, rj, GRID5) == pytest.approx(-2, abs=1e-9)
    assert product_energy(art.output, gadget_ancilla_optimum(art, [ri, rj])) == pytest.approx(-2, abs=1e-12)


def test_sym_single_edge_examples():
    art = sym_gadget_hamiltonian(HEIS, EDGE)
    ra, rd = [0, 0, 1], [0, 0, -1]
    assert gadget_vertex_minimum(art, [ra, rd]) == pytest.approx(-2)
    assert grid_ancilla_min(art.output, ra, rd, GRID5) == pytest.approx(-2, abs=1e-9)
    assert grid_ancilla_min(art.output, ra, ra, GRID5) == pytest.approx(0, abs=1e-12)


def test_sym_gadget_axis_stretch(rng):
    h = 2 * np.kron(Z, Z) + np.kron(X, I) + np.kron(I, X)
    art = sym_gadget_hamiltonian(h, EDGE)
    assert sorted(art.params["W"]) == [0, 0, 2]
    R = np.array(art.params["rotation"])
    for ra, rd in random_unit(rng, 10).reshape(5, 2, 3):
        # the stretch lives in the rotated frame
        expected = -2 * abs((R @ ra)[np.argmax(art.params["W"])] - (R @ rd)[np.argmax(art.params["W"])])
        assert gadget_vertex_minimum(art, [R @ ra, R @ rd]) == pytest.approx(expected, abs=1e-12)
        assert grid_ancilla_min(art.output, R @ ra, R @ rd, GRID5) == pytest.approx(expected, abs=5e-3)


def test_gadget_ancilla_optimum_is_below_samples(rng):
    for h, build in ((ANTI, antisym_gadget_hamiltonian), (HEIS, sym_gadget_hamiltonian)):
        art = build(h, EDGE)
        for _ in range(50):
            r = random_unit(rng, 2)
            best = gadget_vertex_minimum(art, r)
            assert product_energy(art.output, gadget_ancilla_optimum(art, r)) == pytest.approx(best, abs=1e-12)
            full = np.vstack([r, random_unit(rng, 2)])
            assert product_energy(art.output, full) >= best - 1e-12


def test_gadgets_on_empty_graph():
    for h, build in ((ANTI, antisym_gadget_hamiltonian), (HEIS, sym_gadget_hamiltonian)):
        art = build(h, gr.empty(3))
        assert art.output.n == 3 and not art.output.placements
        assert product_energy(art.output, random_unit(np.random.default_rng(0), 3)) == 0


def test_antisym_path_matches_grid_oracle():
    g = gr.path(3)
    art = antisym_gadget_hamiltonian(ANTI, g)
    rep = multi_restart("prod", art.output, restarts=10, seed=0)
    grid = grid_search_vectors(g, Wmc(WeightMatrix(art.params["W"])), OracleBudget(grid_resolution=10.0))
    assert grid.value == pytest.approx(2, abs=1e-9)
    assert rep.best_value == pytest.approx(-2 * grid.value, abs=1e-6)


def test_antisym_normalization_of_general_term(rng):
    A = rng.standard_normal((3, 3))
    v = rng.standard_normal(3)
    h = sum((A - A.T)[i, j] * np.kron(PAULIS[i + 1], PAULIS[j + 1]) for i in range(3) for j in range(3))
    h = h + sum(v[k] * (np.kron(PAULIS[k + 1], I) - np.kron(I, PAULIS[k + 1])) for k in range(3))
    art = antisym_gadget_hamiltonian(h, gr.cycle(3))
    d = art.output.decompositions[0]
    assert np.allclose(d.M, [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]) and np.allclose(d.v, -d.w)
    assert art.params["scale"] > 0
    r = random_unit(rng, 3)
    full = gadget_ancilla_optimum(art, r)
    assert product_energy(art.output, full) == pytest.approx(gadget_vertex_minimum(art, r), abs=1e-12)


def test_gadget_errors():
    with pytest.raises(NotAntisymmetric):
        antisym_gadget_hamiltonian(HEIS, EDGE)
    with pytest.raises(NotSymmetric):
        sym_gadget_hamiltonian(ANTI, EDGE)
    with pytest.raises(OneLocal):
        antisym_gadget_hamiltonian(np.kron(X, I) - np.kron(I, X), EDGE)
    with pytest.raises(OneLocal):
        sym_gadget_hamiltonian(np.kron(Z, I) + np.kron(I, Z), EDGE)
    with pytest.raises(DomainError):
        sym_gadget_hamiltonian(np.kron(Z, Z), threecolor_to_wmc_equal(EDGE))


def test_end_to_end_hamiltonian_identity():
    inner = threecolor_to_wmc_equal(EDGE)
    art = sym_gadget_hamiltonian(HEIS, inner)
    assert art.threshold_yes == pytest.approx(-2 * inner.threshold_yes)
    rep = multi_restart("prod", art.output, restarts=20, seed=0)
    assert rep.best_value == pytest.approx(art.threshold_yes, abs=1e-6)
    assert rep.best_value >= art.threshold_yes - 1e-9


# -- graph reductions --------------------------------------------------------


def test_maxcut_single_edge_forward():
    art = maxcut_to_wmc(EDGE, (1, 0.5, 0), k_override=2)
    x = encode_cut(art, [1, -1])
    assert art.evaluate(x) == 5 == art.threshold_yes
    assert art.threshold_no == 4.5
    assert decode_cut(art, x) == ([1, -1], 1)


def test_maxcut_empty_graph():
    art = maxcut_to_wmc(gr.empty(3), (1, 0, 0))
    assert art.output == gr.empty(3) and art.threshold_yes == 0


def test_maxcut_triangle_grid_optimum():
    art = maxcut_to_wmc(gr.complete(3), (1, 0, 0), k_override=4)
    assert art.output.n == 15 and art.params["C"] == 2
    pm = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    res = grid_search_vectors(art.output, Wmc(WeightMatrix((1, 0, 0))), OracleBudget(grid_resolution=10.0), polish=False, core_points=pm)
    assert res.value == pytest.approx(2 + 12, abs=1e-12)
    assert art.threshold_yes == 14


def test_maxcut_degenerate_weights():
    with pytest.raises(DegenerateWeights):
        maxcut_to_wmc(EDGE, (1, 1, 0))


@pytest.mark.parametrize("name", sorted(COLORABLE))
def test_maxcut_forward_is_exact(name):
    g = COLORABLE[name]
    C, labels = brute_maxcut(g)
    art = maxcut_to_wmc(g, (1, 0.3, 0.1), k_override=3)
    x = encode_cut(art, labels)
    assert art.evaluate(x) == C + 3 * g.n == art.threshold_yes
    assert decode_cut(art, x)[1] == C


def test_decode_cut_examples():
    art = maxcut_to_wmc(gr.cycle(4), (1, 0, 0), k_override=1)
    assert decode_cut(art, encode_cut(art, [1, -1, 1, -1]))[1] == 4
    same = np.tile([0.0, 0.0, 1.0], (art.output.n, 1))
    assert decode_cut(art, same)[1] == 0
    art = maxcut_to_wmc(EDGE, (1, 0, 0), k_override=0)
    v = np.array([[0.9, math.sqrt(1 - 0.81), 0], [-0.8, 0.6, 0]])
    assert decode_cut(art, v) == ([1, -1], 1)


def test_threecolor_examples():
    art = threecolor_to_wmc_equal(EDGE)
    assert art.threshold_yes == pytest.approx(2 * SQRT6 + 1)
    assert art.evaluate(encode_coloring(art, [0, 1])) == pytest.approx(2 * SQRT6 + 1, abs=1e-12)
    art = threecolor_to_wmc_equal(gr.empty(2))
    assert art.output.n == 3 and art.evaluate(encode_coloring(art, [0, 0])) == 0
    art = threecolor_to_wmc_equal(gr.path(3))
    assert art.evaluate(encode_coloring(art, [0, 1, 0])) == pytest.approx(2 * 2 * SQRT6 + 2, abs=1e-12)


def test_twomax_examples():
    art = threecolor_to_wmc_twomax(EDGE, k_override=2)
    assert art.evaluate(encode_coloring(art, [0, 1])) == pytest.approx(2 * 3 + 3 * SQRT3 / 2, abs=1e-12)
    art = threecolor_to_wmc_twomax(gr.empty(2))
    assert art.evaluate(encode_coloring(art, [0, 0])) == 0
    art = threecolor_to_wmc_twomax(gr.complete(3), k_override=2)
    assert art.evaluate(encode_coloring(art, [0, 1, 2])) == pytest.approx(2 * 6 + 3 * 3 * SQRT3 / 2, abs=1e-12)
    with pytest.raises(DegenerateWeights):
        threecolor_to_wmc_twomax(EDGE, gamma=1.0)


def test_twomax_default_star_size():
    assert threecolor_to_wmc_twomax(gr.path(3)).params["K"] == 2**6


def test_mc3_examples():
    art = threecolor_to_mc3(EDGE)
    x = encode_coloring(art, [0, 1])
    assert art.evaluate(x) == pytest.approx(11 + 2 * SQRT3, abs=1e-12)
    assert np.allclose(x.vectors[0], [math.sqrt(8 / 9), 0, -1 / 3])
    art = threecolor_to_mc3(gr.empty(3))
    assert art.evaluate(encode_coloring(art, [0, 0, 0])) == 0


@pytest.mark.parametrize("kind", sorted(THREECOL))
@pytest.mark.parametrize("name", sorted(COLORABLE))
def test_encode_meets_yes_and_decodes(kind, name):
    g = COLORABLE[name]
    col = brute_3coloring(g)
    art = THREECOL[kind](g)
    x = encode_coloring(art, col)
    assert abs(art.evaluate(x) - art.threshold_yes) <= 1e-9
    back = decode_coloring(art, x)
    assert back is not None and same_up_to_permutation(g, back, col)


@pytest.mark.parametrize("kind", sorted(THREECOL))
def test_decode_survives_small_perturbation(kind, rng):
    for g in (gr.cycle(5), COLORABLE["tree6"], gr.complete(3)):
        col = brute_3coloring(g)
        art = THREECOL[kind](g)
        x = encode_coloring(art, col).vectors
        for _ in range(20):
            noise = rng.standard_normal(x.shape)
            noise *= 0.01 / np.linalg.norm(noise, axis=1, keepdims=True)
            y = x + noise
            y /= np.linalg.norm(y, axis=1, keepdims=True)
            back = decode_coloring(art, y)
            assert back is not None and same_up_to_permutation(g, back, col)


@pytest.mark.parametrize("kind", sorted(THREECOL))
def test_k4_cannot_be_encoded_and_decodes_to_failure(kind, rng):
    g = gr.complete(4)
    art = THREECOL[kind](g)
    with pytest.raises(ImproperColoring):
        encode_coloring(art, [0, 1, 2, 0])
    for _ in range(50):
        x = random_unit(rng, art.output.n)
        col = decode_coloring(art, x)
        if col is not None:
            assert all(col[u] != col[v] for u, v in g.edges)
    # an assignment that puts two K4 vertices on the same colour vector fails
    x = random_unit(rng, art.output.n)
    x[1] = x[0]
    assert decode_coloring(art, x) is None


def test_decode_to_t_vector_is_failure():
    g = gr.path(3)
    art = threecolor_to_wmc_equal(g)
    x = encode_coloring(art, [0, 1, 0]).vectors.copy()
    x[2] = x[art.source.n + 1]
    assert decode_coloring(art, x) is None


def test_provenance_counts():
    g = gr.cycle(5)
    n, m = g.n, g.m
    art = threecolor_to_wmc_equal(g)
    assert art.output.n == n + 2 * m + 1
    assert art.role_count("Original") == n and art.role_count("CliqueAncilla") == m
    assert art.role_count("SinkLink") == m and art.role_count("Sink") == 1
    art = threecolor_to_mc3(g)
    assert art.output.n == n + 8 * m + 1
    assert art.role_count("TriangleAncilla") == 6 * m and art.role_count("Sink") == 1
    art = threecolor_to_wmc_twomax(g, k_override=4)
    assert art.output.n == n + m + 4 * (n + m)
    assert art.role_count("TriangleAncilla") == m and art.role_count("StarLeaf") == 4 * (n + m)
    art = maxcut_to_wmc(g, (1, 0, 0), k_override=3)
    assert art.output.n == n + 3 * n and art.role_count("StarLeaf") == 3 * n
    art = antisym_gadget_hamiltonian(ANTI, g)
    assert art.output.n == n + 2 * m and art.role_count("GadgetAncilla") == 2 * m
    for a in (art, threecolor_to_mc3(g)):
        assert len(a.provenance) == a.output.n


def test_artifact_rejects_partial_provenance():
    art = threecolor_to_wmc_equal(EDGE)
    with pytest.raises(DomainError):
        ReductionArtifact(art.kind, art.source, art.output, 1.0, 0.5, art.provenance[:-1], art.params)


@pytest.mark.parametrize(
    "build",
    [
        lambda g: threecolor_to_wmc_equal(g),
        lambda g: threecolor_to_mc3(g),
        lambda g: maxcut_to_wmc(g, (1, 0.5, 0), k_override=2),
        lambda g: sym_gadget_hamiltonian(HEIS, threecolor_to_wmc_equal(g)),
        lambda g: antisym_gadget_hamiltonian(ANTI, g),
    ],
)
def test_artifact_json_roundtrip(build):
    art = build(gr.cycle(3))
    text = json.dumps(art.to_json(), sort_keys=True)
    back = ReductionArtifact.from_json(json.loads(text))
    assert json.dumps(back.to_json(), sort_keys=True) == text


def test_compilation_is_deterministic():
    a = json.dumps(threecolor_to_mc3(gr.petersen()).to_json(), sort_keys=True)
    b = json.dumps(threecolor_to_mc3(gr.petersen()).to_json(), sort_keys=True)
    assert a == b


def test_encoders_reject_wrong_artifact():
    with pytest.raises(DomainError):
        encode_cut(threecolor_to_wmc_equal(EDGE), [1, -1])
    with pytest.raises(DomainError):
        encode_coloring(maxcut_to_wmc(EDGE, (1, 0, 0), k_override=1), [0, 1])


def test_wmc_inner_weight_recorded():
    art = threecolor_to_wmc_twomax(Graph(2, [(0, 1)]), k_override=1, gamma=0.25)
    assert art.weight == WeightMatrix((1, 1, 0.25))
    x = encode_coloring(art, [1, 2])
    assert wmc_value(art.output, art.weight, x) == pytest.approx(art.threshold_yes, abs=1e-12)
