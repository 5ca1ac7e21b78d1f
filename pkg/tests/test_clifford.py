import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extrinsic_dirac.clifford import (
    DIM_CAP,
    CliffordRep,
    direct_sum_rep,
    irreducible_rep,
    nested_rep,
    swap_module,
    trace_products,
    verify_clifford,
    volume_element,
)
from extrinsic_dirac.errors import CapacityError


def anticommutator_residual(gens):
    d = gens[0].shape[0]
    worst = 0.0
    for a, b in itertools.product(range(len(gens)), repeat=2):
        target = -2 * np.eye(d) if a == b else 0
        worst = max(worst, np.max(np.abs(gens[a] @ gens[b] + gens[b] @ gens[a] - target)))
    return worst


def test_line_generator_is_minus_i():
    rep = irreducible_rep(1, 0)
    assert rep.dim == 1
    assert rep.generators[0][0, 0] == pytest.approx(-1j)
    assert np.allclose(rep.volume, np.eye(1))


def test_plane_generators_anticommute():
    rep = irreducible_rep(2)
    assert rep.dim == 2
    assert anticommutator_residual(rep.generators) < 1e-12


def test_odd_module_index_sets_volume_sign():
    assert np.allclose(irreducible_rep(3, 1).volume, -np.eye(2))
    assert np.allclose(irreducible_rep(3, 0).volume, np.eye(2))


def test_swap_negates_generators_and_volume():
    rep = swap_module(irreducible_rep(1, 0))
    assert rep.generators[0][0, 0] == pytest.approx(1j)
    swapped = swap_module(irreducible_rep(3, 0))
    assert np.allclose(swapped.volume, -np.eye(2))
    assert np.allclose(volume_element(swapped.generators), swapped.volume)


def test_swap_rejects_even_dimension():
    with pytest.raises(ValueError):
        swap_module(irreducible_rep(2))


@pytest.mark.parametrize("n", range(1, 9))
def test_irreducible_dimension_and_relations(n):
    rep = irreducible_rep(n)
    assert rep.dim == 2 ** (n // 2)
    assert verify_clifford(rep)["passed"]


def test_capacity_error_above_cap():
    with pytest.raises(CapacityError):
        irreducible_rep(DIM_CAP + 1)
    with pytest.raises(CapacityError):
        direct_sum_rep(irreducible_rep(DIM_CAP), irreducible_rep(1))


def test_even_even_sum_is_one_module_of_dimension_four():
    dec = direct_sum_rep(irreducible_rep(2), irreducible_rep(2))
    assert dec.case == 1
    assert dec.rep.dim == 4
    assert verify_clifford(dec)["passed"]


def test_line_plus_line_grading():
    dec = direct_sum_rep(irreducible_rep(1), irreducible_rep(1))
    assert dec.case == 4
    assert dec.rep.dim == 2
    assert np.allclose(dec.rep.volume, np.diag([1, -1]))
    rep = verify_clifford(dec)
    assert rep["passed"] and rep["block_offdiag"] == 0.0


def test_odd_plus_even_gives_both_modules():
    dec = direct_sum_rep(irreducible_rep(1), irreducible_rep(2))
    assert dec.case == 3
    assert len(dec.modules) == 2
    for j, mod in enumerate(dec.modules):
        assert mod.module_index == j
        assert np.allclose(mod.volume, (-1) ** j * np.eye(mod.dim))
    assert verify_clifford(dec)["passed"]


def test_even_plus_odd_gives_both_modules():
    dec = direct_sum_rep(irreducible_rep(2), irreducible_rep(3, 1))
    assert dec.case == 2
    assert dec.rep.module_index == 1
    assert verify_clifford(dec)["passed"]


def test_perturbed_generator_residual_scales_with_perturbation():
    rep = irreducible_rep(4)
    gens = list(rep.generators)
    bump = np.zeros_like(gens[0])
    bump[0, 1] = 1e-3
    gens[0] = gens[0] + bump
    bad = CliffordRep(4, tuple(gens), 0)
    res = verify_clifford(bad)
    assert 1e-4 < res["relation"] < 1e-2
    assert not res["passed"]


def test_nested_sum_of_total_dimension_eight():
    rep = nested_rep([1, 2, 2, 3])
    assert rep.n == 8
    assert rep.dim == 16
    assert verify_clifford(rep)["passed"]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_products_of_distinct_generators_are_traceless(n):
    assert trace_products(irreducible_rep(n)) < 1e-12


@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 1), st.integers(0, 1))
def test_every_direct_sum_verifies(n, m, jE, jF):
    if n + m > 8:
        return
    E = irreducible_rep(n, jE if n % 2 else 0)
    F = irreducible_rep(m, jF if m % 2 else 0)
    dec = direct_sum_rep(E, F)
    assert dec.rep.n == n + m
    assert dec.rep.dim == 2 ** ((n + m) // 2)
    assert verify_clifford(dec)["passed"]


def test_gamma_of_vector_squares_to_minus_norm():
    rep = irreducible_rep(5)
    v = np.array([0.3, -1.2, 0.5, 2.0, -0.1])
    g = rep.gamma(v)
    assert np.allclose(g @ g, -np.dot(v, v) * np.eye(rep.dim), atol=1e-12)


@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (3, 3), (3, 5)])
def test_odd_odd_prefactor_fixes_grading_sign(n, m):
    dec = direct_sum_rep(irreducible_rep(n), irreducible_rep(m))
    half = dec.blocks[0]
    assert np.allclose(dec.rep.volume[:half, :half], np.eye(half))
    # flipping the prefactor on the E generators flips the grading
    flipped = [-g if k < n else g for k, g in enumerate(dec.rep.generators)]
    vol = volume_element(flipped)
    assert np.allclose(vol[:half, :half], (-1) ** n * np.eye(half))
