import math

import numpy as np
import pytest

from entmeasure import (
    CoefficientMatrix,
    DimensionMismatchError,
    Dims,
    InvalidSplitError,
    LocalUnitary,
    NotAPermutationError,
    PureState,
    StateFormatError,
    UnknownNameError,
    ZeroStateError,
    apply_local_unitary,
    loads_state,
    make_named_state,
    make_perm_phase_state,
    normalize,
    random_state,
    random_unitary,
    reshape_bipartite,
    s2,
    state_from_bipartite,
    state_from_document,
    state_to_document,
    tensor_product,
)

ROOT2 = 1.0 / math.sqrt(2)
BELL_MATRIX = np.array([[0.0, ROOT2], [-ROOT2, 0.0]])  # i*sigma_y/sqrt(2)


def test_dims_validation():
    assert Dims((2, 3)).total_dim == 6
    with pytest.raises(ValueError):
        Dims(())
    with pytest.raises(ValueError):
        Dims((2, 1))


def test_pure_state_checks_amplitude_count():
    with pytest.raises(DimensionMismatchError):
        PureState(Dims((2, 2)), [1, 0, 0])


def test_normalize_simple_scaling():
    state = normalize(PureState(Dims((2,)), [2.0, 0.0]))
    assert np.array_equal(state.amplitudes, np.array([1.0 + 0j, 0.0 + 0j]))


def test_normalize_bell_is_identity():
    bell = make_named_state("bell_singlet")
    again = normalize(bell)
    assert np.array_equal(again.amplitudes, bell.amplitudes)


def test_normalize_uniform():
    state = normalize(PureState(Dims((2, 2)), [1, 1, 1, 1]))
    assert np.array_equal(state.amplitudes, np.full(4, 0.5 + 0j))


def test_normalize_zero_state_rejected():
    with pytest.raises(ZeroStateError):
        normalize(PureState(Dims((2,)), [0.0, 0.0]))


def test_s2_examples():
    assert s2(CoefficientMatrix(BELL_MATRIX)) == pytest.approx(1.0, abs=1e-15)
    assert s2(np.zeros((3, 4))) == 0.0
    assert s2(np.eye(2)) == 2.0


def test_reshape_bell_singlet_matches_pauli_form():
    bell = make_named_state("bell_singlet")
    matrix = reshape_bipartite(bell, {0})
    assert np.allclose(matrix.entries, BELL_MATRIX, atol=1e-15)


def test_reshape_basis_state():
    state = PureState(Dims((2, 2)), [1, 0, 0, 0])
    matrix = reshape_bipartite(state, {0})
    assert np.array_equal(matrix.entries, np.array([[1, 0], [0, 0]], dtype=complex))


def test_reshape_ghz_against_basis_label_enumeration():
    # independent oracle: place each amplitude by explicit label arithmetic
    ghz = make_named_state("ghz", 3)
    expected = np.zeros((2, 4), dtype=complex)
    for x0 in range(2):
        for x1 in range(2):
            for x2 in range(2):
                flat = (x0 * 2 + x1) * 2 + x2
                expected[x0, x1 * 2 + x2] = ghz.amplitudes[flat]
    assert np.array_equal(reshape_bipartite(ghz, {0}).entries, expected)
    assert expected[0, 0] == pytest.approx(ROOT2)
    assert expected[1, 3] == pytest.approx(ROOT2)


def test_reshape_rejects_bad_splits():
    bell = make_named_state("bell_singlet")
    with pytest.raises(InvalidSplitError):
        reshape_bipartite(bell, set())
    with pytest.raises(InvalidSplitError):
        reshape_bipartite(bell, {0, 1})
    with pytest.raises(InvalidSplitError):
        reshape_bipartite(bell, {0, 5})


@pytest.mark.parametrize("seed", range(8))
def test_reshape_preserves_s2_exactly(seed):
    rng = np.random.default_rng(seed)
    dims = [int(d) for d in rng.integers(2, 4, size=rng.integers(2, 5))]
    state = random_state(dims, seed + 77)
    n = len(dims)
    subsets = [s for s in range(1, 2**n - 1)]
    left = [i for i in range(n) if (int(rng.choice(subsets)) >> i) & 1]
    left = left or [0]
    if len(left) == n:
        left = left[:-1]
    matrix = reshape_bipartite(state, left)
    assert s2(matrix) == state.norm_squared


@pytest.mark.parametrize("seed", range(8))
def test_reshape_round_trip_bit_exact(seed):
    state = random_state([2, 3, 2], seed)
    for left in ([0], [1], [2], [0, 2], [1, 2]):
        matrix = reshape_bipartite(state, left)
        back = state_from_bipartite(matrix, state.dims, left)
        assert np.array_equal(back.amplitudes, state.amplitudes)


def test_perm_phase_identity_perm_gives_phi_plus():
    state = make_perm_phase_state(2, [0, 1], np.zeros((2, 2)))
    assert np.allclose(state.amplitudes, [ROOT2, 0, 0, ROOT2], atol=1e-15)


def test_perm_phase_swap_with_pi_phase():
    phases = np.zeros((2, 2))
    phases[0, 1] = math.pi
    state = make_perm_phase_state(2, [1, 0], phases)
    matrix = reshape_bipartite(state, {0}).entries
    top = np.linalg.eigvalsh(matrix.conj().T @ matrix)[-1]
    assert top == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_perm_phase_gram_is_identity_over_n(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        perm = rng.permutation(n)
        phases = rng.uniform(0, 2 * math.pi, size=(n, n))
        state = make_perm_phase_state(n, perm, phases)
        matrix = reshape_bipartite(state, {0}).entries
        gram = matrix.conj().T @ matrix
        assert np.max(np.abs(gram - np.eye(n) / n)) < 1e-12
        assert abs(state.norm_squared - 1.0) < 1e-12


def test_perm_phase_rejects_non_permutation():
    with pytest.raises(NotAPermutationError):
        make_perm_phase_state(3, [0, 0, 2], np.zeros((3, 3)))


def test_named_states():
    bell = make_named_state("bell_singlet")
    assert np.allclose(bell.amplitudes, [0, ROOT2, -ROOT2, 0], atol=1e-15)
    ghz = make_named_state("ghz", 3)
    assert ghz.amplitudes[0] == pytest.approx(ROOT2)
    assert ghz.amplitudes[7] == pytest.approx(ROOT2)
    assert np.count_nonzero(ghz.amplitudes) == 2
    w = make_named_state("w(3)")
    expected = np.zeros(8)
    expected[[1, 2, 4]] = 1 / math.sqrt(3)
    assert np.allclose(w.amplitudes, expected, atol=1e-15)


def test_named_state_errors():
    with pytest.raises(UnknownNameError):
        make_named_state("bogus")
    with pytest.raises(ValueError):
        make_named_state("ghz", 2)
    with pytest.raises(ValueError):
        make_named_state("w(4)", 5)


def test_random_state_deterministic_and_normalized():
    first = random_state([2, 3], 123)
    second = random_state([2, 3], 123)
    assert np.array_equal(first.amplitudes, second.amplitudes)
    assert abs(first.norm_squared - 1.0) < 1e-12
    assert not np.array_equal(first.amplitudes, random_state([2, 3], 124).amplitudes)


def test_random_two_qubit_top_eigenvalue_bounds():
    # dense eigensolve oracle: the two Gram eigenvalues sum to 1, so the top
    # one cannot drop below 1/2
    state = random_state([2, 2], 7)
    matrix = reshape_bipartite(state, {0}).entries
    top = np.linalg.eigvalsh(matrix.conj().T @ matrix)[-1]
    assert 0.5 <= top <= 1.0 + 1e-12


def test_local_unitary_validation():
    with pytest.raises(ValueError):
        LocalUnitary(0, np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(DimensionMismatchError):
        apply_local_unitary(make_named_state("bell_singlet"), LocalUnitary(0, np.eye(3)))
    with pytest.raises(DimensionMismatchError):
        apply_local_unitary(make_named_state("bell_singlet"), LocalUnitary(5, np.eye(2)))


def test_apply_identity_and_bit_flip():
    bell = make_named_state("bell_singlet")
    same = apply_local_unitary(bell, LocalUnitary(1, np.eye(2)))
    assert np.array_equal(same.amplitudes, bell.amplitudes)
    ket00 = PureState(Dims((2, 2)), [1, 0, 0, 0])
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    flipped = apply_local_unitary(ket00, LocalUnitary(0, sigma_x))
    assert np.array_equal(flipped.amplitudes, np.array([0, 0, 1, 0], dtype=complex))


@pytest.mark.parametrize("seed", range(6))
def test_local_unitary_preserves_norm(seed):
    state = random_state([2, 3, 2], seed)
    rng = np.random.default_rng(seed + 1000)
    for target in range(3):
        u = LocalUnitary(target, random_unitary(state.dims[target], rng))
        rotated = apply_local_unitary(state, u)
        assert abs(rotated.norm_squared - 1.0) < 1e-12


def test_tensor_product_basis_and_bell():
    ket0 = PureState(Dims((2,)), [1, 0])
    ket1 = PureState(Dims((2,)), [0, 1])
    combined = tensor_product(ket0, ket1)
    assert combined.dims.dims == (2, 2)
    assert np.array_equal(combined.amplitudes, np.array([0, 1, 0, 0], dtype=complex))

    extended = tensor_product(make_named_state("bell_singlet"), ket0)
    assert extended.dims.dims == (2, 2, 2)
    expected = np.zeros(8, dtype=complex)
    expected[0b010] = ROOT2
    expected[0b100] = -ROOT2
    assert np.allclose(extended.amplitudes, expected, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_tensor_product_of_normalized_states_is_normalized(seed):
    a = random_state([2], seed)
    b = random_state([3], seed + 50)
    assert abs(tensor_product(a, b).norm_squared - 1.0) < 1e-12


def test_state_document_round_trip():
    state = random_state([2, 3], 5)
    text_state = loads_state(
        __import__("json").dumps(state_to_document(state))
    )
    assert np.array_equal(text_state.amplitudes, state.amplitudes)
    assert text_state.dims.dims == state.dims.dims


@pytest.mark.parametrize(
    "document",
    [
        [],
        {"dims": [2, 2]},
        {"dims": [2, 2], "amplitudes": [[0, 0]] * 4, "extra": 1},
        {"dims": "22", "amplitudes": [[0, 0]] * 4},
        {"dims": [2, 2], "amplitudes": [[0, 0]] * 3},
        {"dims": [2, 2], "amplitudes": [[0, 0], [0, 0], [0, 0], [0, "x"]]},
        {"dims": [2, 1], "amplitudes": [[0, 0], [0, 0]]},
    ],
)
def test_state_document_validation(document):
    with pytest.raises(StateFormatError):
        state_from_document(document)


def test_loads_state_rejects_bad_json():
    with pytest.raises(StateFormatError):
        loads_state("not json")
