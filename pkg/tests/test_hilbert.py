import numpy as np
import pytest

from atomswitch import (
    InvalidArgumentError,
    annihilation,
    atom_excitation,
    atom_lowering,
    atom_raising,
    build_space,
    check_density_matrix,
    creation,
    expectation,
    identity,
    ket,
    number_operator,
    projector,
)
from atomswitch.hilbert import ATOM_EXCITED, ATOM_GROUND


def test_build_space_dimensions():
    assert build_space(1).dim == 4
    assert build_space(4).dim == 10
    assert build_space(4).dim_mode == 5
    assert build_space(4).dim_atom == 2


@pytest.mark.parametrize("bad", [0, -1, 0.5])
def test_build_space_rejects_bad_nmax(bad):
    with pytest.raises(InvalidArgumentError):
        build_space(bad)


def test_index_label_round_trip_is_bijection():
    space = build_space(3)
    seen = set()
    for n in range(space.n_max + 1):
        for s in (ATOM_GROUND, ATOM_EXCITED):
            idx = space.index(n, s)
            assert space.labels(idx) == (n, s)
            seen.add(idx)
    assert seen == set(range(space.dim))


def test_annihilation_ladder_elements():
    space = build_space(4)
    a = annihilation(space)
    bra_0g = ket(space, 0, ATOM_GROUND).conj()
    bra_1g = ket(space, 1, ATOM_GROUND).conj()
    assert bra_0g @ a @ ket(space, 1, ATOM_GROUND) == pytest.approx(1.0)
    assert bra_1g @ a @ ket(space, 2, ATOM_GROUND) == pytest.approx(np.sqrt(2.0))
    # identity on the atom factor
    assert abs(bra_0g @ a @ ket(space, 1, ATOM_EXCITED)) == 0.0


def test_commutator_is_identity_below_truncation_edge():
    space = build_space(5)
    a = annihilation(space)
    comm = a @ creation(space) - creation(space) @ a
    # direct matrix computation: the block with photon number < n_max is
    # exactly the identity; the deviation sits on the edge states
    edge = [space.index(space.n_max, s) for s in (0, 1)]
    keep = [i for i in range(space.dim) if i not in edge]
    block = comm[np.ix_(keep, keep)]
    np.testing.assert_allclose(block, np.eye(len(keep)), atol=1e-14)
    assert comm[edge[0], edge[0]] == pytest.approx(-space.n_max)


def test_atom_lowering_two_level_algebra():
    space = build_space(2)
    sm = atom_lowering(space)
    sp = atom_raising(space)
    np.testing.assert_allclose(sm @ sp + sp @ sm, np.eye(space.dim), atol=1e-15)
    np.testing.assert_allclose(sm @ sm, 0.0, atol=1e-15)
    amp = ket(space, 0, ATOM_GROUND).conj() @ sm @ ket(space, 0, ATOM_EXCITED)
    assert amp == pytest.approx(1.0)


def test_expectation_trivials():
    space = build_space(3)
    rho = projector(space, 2, ATOM_GROUND)
    assert expectation(identity(space), rho) == pytest.approx(1.0)
    assert expectation(number_operator(space), rho) == pytest.approx(2.0)
    assert expectation(atom_excitation(space), rho) == pytest.approx(0.0)


def test_expectation_is_linear_in_the_state():
    space = build_space(2)
    rng = np.random.default_rng(42)
    op = rng.standard_normal((space.dim, space.dim)) \
        + 1j * rng.standard_normal((space.dim, space.dim))
    for _ in range(20):
        r1 = rng.standard_normal((space.dim, space.dim)) * (1 + 1j)
        r2 = rng.standard_normal((space.dim, space.dim)) * (1 - 0.5j)
        al, be = rng.standard_normal(2)
        lhs = expectation(op, al * r1 + be * r2)
        rhs = al * expectation(op, r1) + be * expectation(op, r2)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_expectation_rejects_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        expectation(np.eye(4), np.eye(6))


def test_construction_is_deterministic():
    space = build_space(4)
    assert np.array_equal(annihilation(space), annihilation(space))
    assert np.array_equal(atom_lowering(space), atom_lowering(space))


def test_check_density_matrix_accepts_valid_and_rejects_invalid():
    space = build_space(2)
    check_density_matrix(projector(space, 1, ATOM_GROUND))
    with pytest.raises(InvalidArgumentError):
        check_density_matrix(2.0 * projector(space, 1, ATOM_GROUND))
    bad = projector(space, 1, ATOM_GROUND).astype(complex)
    bad[0, 1] = 1e-3   # not Hermitian
    with pytest.raises(InvalidArgumentError):
        check_density_matrix(bad)
