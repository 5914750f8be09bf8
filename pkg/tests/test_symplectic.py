import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import pfaffian
from prlab.symplectic import (
    IndependenceError,
    IrrationalityVector,
    ProductSymplecticStructure,
    build_omega_irr,
    contract_field,
    distinguished_vector_field,
    form_pairing,
    hamiltonian_vector_field,
)

SQRT2, SQRT3 = np.sqrt(2.0), np.sqrt(3.0)


def test_matrix_n2_block_pattern(torus4):
    expected = np.array(
        [
            [0.0, -1.0, SQRT3, 0.0],
            [1.0, 0.0, -SQRT2, 0.0],
            [-SQRT3, SQRT2, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    assert np.array_equal(torus4.matrix, expected)


def test_antisymmetry_exact(torus4, torus6):
    for t in (torus4, torus6):
        assert np.array_equal(t.matrix, -t.matrix.T)


@given(
    st.lists(st.floats(min_value=0.05, max_value=3.0), min_size=2, max_size=2),
)
@settings(max_examples=30, deadline=None)
def test_antisymmetry_any_entries(entries):
    vec = IrrationalityVector(n=2, entries=tuple(entries))
    t = build_omega_irr(vec, check_independence=False)
    assert np.array_equal(t.matrix, -t.matrix.T)


def test_determinant_two_ways(torus4, torus6):
    for t in (torus4, torus6):
        det = np.linalg.det(t.matrix)
        pf = pfaffian(t.matrix)
        assert abs(det) > 1e-12
        assert abs(det - pf**2) <= 1e-12 * max(1.0, abs(det))


def test_determinant_two_ways_random():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        vec = IrrationalityVector(n=n, entries=tuple(rng.uniform(0.2, 2.0, 2 * (n - 1))))
        t = build_omega_irr(vec, check_independence=False)
        det = np.linalg.det(t.matrix)
        assert abs(det - pfaffian(t.matrix) ** 2) <= 1e-10 * max(1.0, abs(det))


def test_distinguished_field_n2(torus4):
    x = distinguished_vector_field(torus4)
    assert np.max(np.abs(x - np.array([SQRT2, SQRT3, 1.0, 0.0]))) <= 1e-12
    assert x[-1] == 0.0


def test_distinguished_field_n3(torus6):
    x = distinguished_vector_field(torus6)
    expected = np.array([np.sqrt(2), np.sqrt(3), np.sqrt(5), np.sqrt(7), 1.0, 0.0])
    assert np.max(np.abs(x - expected)) <= 1e-12
    assert x[-1] == 0.0
    assert x[-2] == pytest.approx(1.0, abs=1e-12)


def test_zero_covector(torus4):
    assert np.array_equal(hamiltonian_vector_field(torus4, np.zeros(4)), np.zeros(4))


def test_field_matches_literal_inverse_oracle(torus4, rng):
    # independent route: assemble the defining equations sum_i X_i w(e_i, e_j)
    # = -dH_j from a hand-written matrix and solve them densely
    a1, b1 = SQRT2, SQRT3
    omega_lit = np.array(
        [
            [0.0, -1.0, b1, 0.0],
            [1.0, 0.0, -a1, 0.0],
            [-b1, a1, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    for _ in range(25):
        dh = rng.normal(size=4)
        x = hamiltonian_vector_field(torus4, dh)
        x_oracle = np.linalg.solve(omega_lit.T, -dh)
        assert np.max(np.abs(x - x_oracle)) <= 1e-12 * max(1.0, np.max(np.abs(x_oracle)))
        residual = np.array([form_pairing(torus4, x, e) + dh[j] for j, e in enumerate(np.eye(4))])
        assert np.max(np.abs(residual)) <= 1e-12


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_solve_contract_roundtrip(torus4, seed):
    dh = np.random.default_rng(seed).normal(size=4)
    x = hamiltonian_vector_field(torus4, dh)
    assert np.max(np.abs(contract_field(torus4, x) + dh)) <= 1e-12


def test_batched_solve(torus4, rng):
    dh = rng.normal(size=(7, 4))
    xs = hamiltonian_vector_field(torus4, dh)
    for i in range(7):
        assert np.allclose(xs[i], hamiltonian_vector_field(torus4, dh[i]), atol=1e-14)


def test_dimension_mismatch(torus4):
    with pytest.raises(ValueError):
        hamiltonian_vector_field(torus4, np.zeros(6))


def test_n_below_2_rejected():
    with pytest.raises(ValueError):
        IrrationalityVector(n=1, entries=())


def test_entry_count_checked():
    with pytest.raises(ValueError):
        IrrationalityVector(n=3, entries=(1.0, 2.0))


def test_sqrt_primes_independent():
    IrrationalityVector.sqrt_primes(2).check_independence()
    IrrationalityVector.sqrt_primes(3).check_independence()


def test_rational_vector_rejected():
    vec = IrrationalityVector(n=2, entries=(1.5, 2.0 / 3.0))
    with pytest.raises(IndependenceError):
        vec.check_independence()
    with pytest.raises(IndependenceError):
        build_omega_irr(vec)


def test_bounded_height_relations_exhaustive_n2():
    # cross-check the relation finder against an exhaustive sweep of
    # q0 + q1 a + r1 b with |q1|, |r1| <= 300 on a safe and an unsafe vector
    def exhaustive_has_relation(a, b, height=300, tol=1e-9):
        q = np.arange(-height, height + 1)
        qa, rb = np.meshgrid(q * a, q * b, indexing="ij")
        s = qa + rb
        frac = np.abs(s - np.round(s))
        frac[height, height] = 1.0  # exclude q1 = r1 = 0 (q0 = 0 is then forced)
        return bool(np.min(frac) < tol)

    assert not exhaustive_has_relation(np.sqrt(2), np.sqrt(3))
    assert exhaustive_has_relation(1.5, 2.0 / 3.0)


def test_product_structure(torus4):
    prod = ProductSymplecticStructure(base_dim=2, torus=torus4)
    assert prod.dim == 6
    m = prod.matrix
    assert np.array_equal(m, -m.T)
    assert np.array_equal(m[:2, :2], np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert np.array_equal(m[2:, 2:], torus4.matrix)
    assert np.all(m[:2, 2:] == 0.0) and np.all(m[2:, :2] == 0.0)
    assert abs(np.linalg.det(m)) > 1e-12
    # the embedded distinguished field solves the product equation for dy_n
    dh = np.zeros(6)
    dh[-1] = 1.0
    x = hamiltonian_vector_field(prod, dh)
    assert np.max(np.abs(x - prod.distinguished_field)) <= 1e-12
    assert np.all(prod.distinguished_field[:2] == 0.0)
