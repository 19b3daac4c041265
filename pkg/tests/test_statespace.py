import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from subsetid import (
    Cut,
    DensityOperator,
    Factor,
    Layout,
    StateVector,
    is_maximally_entangled,
    partial_trace,
    qubit_layout,
    reduced_state,
    regroup,
    regroup_coefficients,
    schmidt_coefficients,
    tensor,
)
from subsetid.statespace import permute_factors, projector, support_basis, with_copy

SQ2 = 1.0 / math.sqrt(2)


def bell_like(*amps):
    return StateVector(qubit_layout("A", "B"), np.array(amps) * SQ2)


class TestLayout:
    def test_factor_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            Factor("", 1, 2)
        with pytest.raises(ValueError):
            Factor("A", 0, 2)
        with pytest.raises(ValueError):
            Factor("A", 1, 1)

    def test_duplicate_factor_rejected(self):
        with pytest.raises(ValueError, match="duplicate factor"):
            Layout((Factor("A", 1, 2), Factor("A", 1, 2)))

    def test_party_order_is_first_appearance(self):
        layout = Layout(
            (Factor("B", 1, 2), Factor("A", 1, 3), Factor("B", 2, 2))
        )
        assert layout.parties == ("B", "A")
        assert layout.positions_of("B") == (0, 2)
        assert layout.party_dim("B") == 4
        assert layout.dim == 12

    def test_qubit_layout(self):
        layout = qubit_layout("A", "B", "C", copy=3)
        assert layout.dims == (2, 2, 2)
        assert all(f.copy == 3 for f in layout.factors)


class TestStateVector:
    def test_norm_checked(self):
        with pytest.raises(ValueError, match="not normalized"):
            StateVector(qubit_layout("A", "B"), [1, 0, 0, 1])

    def test_length_checked(self):
        with pytest.raises(ValueError, match="length 3"):
            StateVector(qubit_layout("A", "B"), [1, 0, 0])

    def test_amplitudes_read_only(self):
        s = bell_like(1, 0, 0, 1)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.5

    def test_overlap(self):
        b1 = bell_like(1, 0, 0, 1)
        b2 = bell_like(1, 0, 0, -1)
        assert b1.overlap(b2) == pytest.approx(0)
        assert b1.overlap(b1) == pytest.approx(1)
        with pytest.raises(ValueError, match="common layout"):
            b1.overlap(StateVector(qubit_layout("A", "C"), b1.amplitudes))


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(ValueError, match="Hermitian"):
            DensityOperator(Layout((Factor("A", 1, 2),)), m)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityOperator(Layout((Factor("A", 1, 2),)), np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        m = np.array([[1.5, 0], [0, -0.5]])
        with pytest.raises(ValueError, match="negative"):
            DensityOperator(Layout((Factor("A", 1, 2),)), m)


def test_tensor_keeps_factor_order():
    b1 = bell_like(1, 0, 0, 1)
    prod = tensor(with_copy(b1, 1), with_copy(b1, 2))
    assert [(f.party, f.copy) for f in prod.layout.factors] == [
        ("A", 1), ("B", 1), ("A", 2), ("B", 2),
    ]
    with pytest.raises(ValueError, match="duplicate"):
        tensor(b1, b1)


def test_permute_factors_convention():
    # new factor i is old factor order[i], exactly numpy transpose
    a = StateVector(Layout((Factor("A", 1, 2),)), [1, 0])
    b = StateVector(Layout((Factor("B", 1, 2),)), [0, 1])
    ab = tensor(a, b)  # |01>
    ba = permute_factors(ab, (1, 0))
    assert ba.layout.factors[0].party == "B"
    assert_allclose(ba.amplitudes, [0, 0, 1, 0])  # |10> in B,A order
    with pytest.raises(ValueError, match="permutation"):
        permute_factors(ab, (0, 0))


def test_regroup_party_major():
    b1 = bell_like(1, 0, 0, 1)
    stacked = tensor(with_copy(b1, 1), with_copy(b1, 2))  # A1 B1 A2 B2
    grouped = regroup(stacked, Cut.between("A", "B"))
    assert [(f.party, f.copy) for f in grouped.layout.factors] == [
        ("A", 1), ("A", 2), ("B", 1), ("B", 2),
    ]
    # regrouped Bell pair: sum_{ij} |ij>_A |ij>_B / 2
    expected = np.zeros(16)
    for i in range(2):
        for j in range(2):
            expected[(2 * i + j) * 4 + 2 * i + j] = 0.5
    assert_allclose(grouped.amplitudes, expected, atol=1e-15)


class TestReductions:
    def test_bell_reduction_is_maximally_mixed(self):
        b1 = bell_like(1, 0, 0, 1)
        rho = reduced_state(b1, keep=[0])
        assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-15)

    def test_partial_trace_matches_vector_route(self):
        b3 = bell_like(0, 1, 1, 0)
        via_rho = partial_trace(projector(b3), keep=[1])
        via_vec = reduced_state(b3, keep=[1])
        assert_allclose(via_rho.matrix, via_vec.matrix, atol=1e-15)

    def test_keep_must_be_valid(self):
        b1 = bell_like(1, 0, 0, 1)
        with pytest.raises(ValueError):
            reduced_state(b1, keep=[])
        with pytest.raises(ValueError):
            reduced_state(b1, keep=[5])


def test_schmidt_and_mes():
    cut = Cut.between("A", "B")
    b2 = bell_like(1, 0, 0, -1)
    assert_allclose(schmidt_coefficients(b2, cut), [SQ2, SQ2])
    assert is_maximally_entangled(b2, cut)
    product = StateVector(qubit_layout("A", "B"), [1, 0, 0, 0])
    assert not is_maximally_entangled(product, cut)


def test_support_basis_spans_the_mixture():
    b1, b2 = bell_like(1, 0, 0, 1), bell_like(1, 0, 0, -1)
    rho = DensityOperator(
        b1.layout, (projector(b1).matrix + projector(b2).matrix) / 2
    )
    basis = support_basis(rho)
    assert len(basis) == 2
    span = sum(np.outer(s.amplitudes, s.amplitudes.conj()) for s in basis)
    assert_allclose(span, projector(b1).matrix + projector(b2).matrix, atol=1e-12)


class TestCut:
    def test_sides_must_be_nonempty_and_disjoint(self):
        with pytest.raises(ValueError, match="nonempty"):
            Cut.between("", "B")
        with pytest.raises(ValueError, match="overlap"):
            Cut.between("AB", "B")

    def test_validate_for(self):
        cut = Cut.between("A", "Q")
        with pytest.raises(ValueError, match="unknown \\['Q'\\]"):
            cut.validate_for(qubit_layout("A", "B"))

    def test_label_and_dims(self):
        layout = qubit_layout("A", "B", "C")
        cut = Cut.between("C", "AB")
        assert cut.label(layout) == "C:AB"
        assert cut.side_dims(layout) == (2, 4)


class TestRegroupCoefficients:
    def setup_method(self):
        self.cut = Cut.between("A", "B")
        self.bells = [
            np.array([1, 0, 0, 1]) * SQ2,
            np.array([1, 0, 0, -1]) * SQ2,
            np.array([0, 1, 1, 0]) * SQ2,
            np.array([0, 1, -1, 0]) * SQ2,
        ]

    def stacked(self, a, b):
        return tensor(with_copy(a, 1), with_copy(b, 2))

    def test_bell_pair_coefficients(self):
        b1 = bell_like(1, 0, 0, 1)
        c = regroup_coefficients(self.stacked(b1, b1), self.cut, self.bells, self.bells)
        # B1 x B1 regroups onto equal-index Bell pairs with weights 1/2
        assert_allclose(np.abs(c) ** 2, np.diag([0.25, 0.25, 0.25, 0.25]), atol=1e-12)

    def test_rejects_non_orthonormal_basis(self):
        b1 = bell_like(1, 0, 0, 1)
        bad = [self.bells[0], self.bells[0], self.bells[2], self.bells[3]]
        with pytest.raises(ValueError, match="not orthonormal"):
            regroup_coefficients(self.stacked(b1, b1), self.cut, bad, self.bells)

    def test_rejects_incomplete_basis(self):
        b1 = bell_like(1, 0, 0, 1)
        with pytest.raises(ValueError, match="captured weight"):
            regroup_coefficients(
                self.stacked(b1, b1), self.cut, self.bells[:2], self.bells
            )


# --- property tests ---

amplitude = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@st.composite
def random_two_qubit_state(draw):
    re = draw(st.lists(amplitude, min_size=4, max_size=4))
    im = draw(st.lists(amplitude, min_size=4, max_size=4))
    v = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        v = np.array([1.0, 0, 0, 0])
        norm = 1.0
    return StateVector(qubit_layout("A", "B"), v / norm)


@settings(max_examples=60, deadline=None)
@given(random_two_qubit_state())
def test_schmidt_coefficients_carry_the_norm(s):
    coeffs = schmidt_coefficients(s, Cut.between("A", "B"))
    assert np.all(coeffs >= -1e-12)
    assert np.sum(coeffs**2) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(random_two_qubit_state())
def test_reductions_are_valid_states(s):
    rho = reduced_state(s, keep=[0])
    assert_allclose(rho.matrix, rho.matrix.conj().T, atol=1e-12)
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-12


@settings(max_examples=40, deadline=None)
@given(random_two_qubit_state(), random_two_qubit_state())
def test_overlap_invariant_under_permutation(a, b):
    pa, pb = permute_factors(a, (1, 0)), permute_factors(b, (1, 0))
    assert pa.overlap(pb) == pytest.approx(a.overlap(b), abs=1e-12)
