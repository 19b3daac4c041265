"""Counting certificates of subset unidentifiability.

A certificate is a machine-checked record that a task instance satisfies the
premises of a counting argument: when the candidate hypotheses are pairwise
orthogonal and every stacked state is carried onto every other by a unitary
acting on one side of a cut only, the number of hypotheses kappa = C(D, k)
must not exceed the dimension of that unitary side, or the hypotheses cannot
be told apart by operations local to the cut. The certificate names the
indistinguishability principle it leans on, reports each premise check, and
gives the verdict:

* ``Certified``       premises hold and kappa exceeds the bound;
* ``ConditionFails``  premises hold but the count does not clear the bound;
* ``PremiseFails``    at least one premise check failed, nothing is claimed.

All premise checks run on single-copy data, which keeps instances near the
resource guard exact and fast. The reductions used are equivalent to the
stacked ones: a reduction of a stacked product state is the tensor product
of single-copy reductions, so equality of all stacked reductions is exactly
equality of all single-copy reductions, and a product of states is maximally
entangled across a cut exactly when every factor is. Hypothesis overlaps
come from the permanent identity

    tr(rho_i rho_j) = perm(F) / k!   with   F[s][t] = |<psi_{i_s}|psi_{j_t}>|^2

which follows from expanding both ordering sums.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .families import ges_basis
from .statespace import ATOL, Cut, _vector_reduction, is_maximally_entangled
from .subsets import DEFAULT_MAX_DIM, StateSet, enumerate_subsets

AXIOM_MES = "complete-MES-basis-indistinguishability"
AXIOM_ONE_SIDED = "one-sided-unitary-family-indistinguishability"

CERTIFIED = "Certified"
CONDITION_FAILS = "ConditionFails"
PREMISE_FAILS = "PremiseFails"

#: request marker: certify every bipartition of the parties
ALL_CUTS = "all"


@dataclass(frozen=True, eq=False)
class CertificateRequest:
    """What to certify: a state set, the subset size, and one cut or all.

    Subset sizes are restricted to 1 < k < D; identifying a single state is
    a different task, and k = D leaves nothing to identify.
    """

    state_set: StateSet
    k: int
    cut: Cut | str = ALL_CUTS
    tol: float = ATOL
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        d = len(self.state_set)
        if not 1 < self.k < d:
            raise ValueError(f"subset size k={self.k} must satisfy 1 < k < D={d}")
        if not isinstance(self.cut, Cut) and self.cut != ALL_CUTS:
            raise ValueError(f"cut must be a Cut or the marker {ALL_CUTS!r}")

    @property
    def stacked_dim(self) -> int:
        return self.state_set.layout.dim ** self.k


@dataclass(frozen=True, eq=False)
class Certificate:
    set_name: str
    n_states: int
    k: int
    cut: str
    kappa: int
    bound: int
    unitary_side: str
    axiom: str
    premises: dict[str, bool]
    verdict: str


@dataclass(frozen=True, eq=False)
class GenuineResult:
    """Per-cut certificates plus the aggregate over every bipartition.

    The aggregate is ``Certified`` only when every single cut is, i.e. the
    task stays unidentifiable no matter how the parties group into two labs;
    any failed premise dominates, otherwise a missed bound reports
    ``ConditionFails``.
    """

    certificates: tuple[Certificate, ...]
    verdict: str


def _ryser_permanents(blocks: np.ndarray) -> np.ndarray:
    """Permanents of a batch of k-by-k real matrices via Ryser's formula."""
    _, k, _ = blocks.shape
    total = np.zeros(blocks.shape[0])
    for mask in range(1, 2 ** k):
        cols = [c for c in range(k) if mask >> c & 1]
        rowsums = blocks[:, :, cols].sum(axis=2)
        total += (-1) ** (k - len(cols)) * rowsums.prod(axis=1)
    return total


def max_hypothesis_overlap(state_set: StateSet, k: int) -> float:
    """Largest tr(rho_i rho_j) over distinct subsets, via the permanent identity."""
    subsets = enumerate_subsets(len(state_set), k)
    g2 = np.abs(state_set.gram) ** 2
    pairs = list(itertools.combinations(range(len(subsets)), 2))
    blocks = np.empty((len(pairs), k, k))
    for idx, (i, j) in enumerate(pairs):
        blocks[idx] = g2[np.ix_(subsets[i], subsets[j])]
    return float(_ryser_permanents(blocks).max() / math.factorial(k))


def _reductions_agree(state_set: StateSet, positions: tuple[int, ...], tol: float) -> bool:
    """Do all members have the same reduced operator on the given factors?"""
    keep = sorted(positions)
    dims = state_set.layout.dims
    mats = [_vector_reduction(s.amplitudes, dims, keep) for s in state_set.states]
    for a, b in itertools.combinations(mats, 2):
        if np.max(np.abs(a - b)) > tol:
            return False
    return True


def certify_cut(request: CertificateRequest) -> Certificate:
    """Evaluate the counting certificate for a single bipartition.

    The unitary side is the cut side of larger stacked dimension (ties go to
    the right side), and the bound is that dimension. With equal side
    dimensions and every member maximally entangled, the certificate cites
    the complete-basis principle; otherwise it cites the one-sided-unitary
    principle, whose premise (all stacked states share their reduction on
    the identity side) is checked explicitly.
    """
    if not isinstance(request.cut, Cut):
        raise ValueError("certify_cut needs a single cut; use certify_genuine for all")
    state_set, k, tol = request.state_set, request.k, request.tol
    if request.stacked_dim > request.max_dim:
        raise ResourceLimitError(
            f"stacked dimension {state_set.layout.dim}**{k} = {request.stacked_dim} "
            f"exceeds the guard of {request.max_dim}"
        )
    cut = request.cut
    layout = state_set.layout
    lpos, rpos = cut.positions(layout)
    dims = layout.dims
    left_stacked = math.prod(dims[i] for i in lpos) ** k
    right_stacked = math.prod(dims[i] for i in rpos) ** k
    unitary_side = "left" if left_stacked > right_stacked else "right"
    bound = max(left_stacked, right_stacked)
    identity_positions = rpos if unitary_side == "left" else lpos

    premises: dict[str, bool] = {}
    premises["pairwise-orthogonal-hypotheses"] = (
        max_hypothesis_overlap(state_set, k) <= tol
    )
    mes_all = all(is_maximally_entangled(s, cut, tol) for s in state_set.states)
    if left_stacked == right_stacked and mes_all:
        axiom = AXIOM_MES
        premises["all-states-maximally-entangled"] = True
    else:
        axiom = AXIOM_ONE_SIDED
        premises["equal-identity-side-reductions"] = _reductions_agree(
            state_set, identity_positions, tol
        )

    kappa = math.comb(len(state_set), k)
    if not all(premises.values()):
        verdict = PREMISE_FAILS
    elif kappa > bound:
        verdict = CERTIFIED
    else:
        verdict = CONDITION_FAILS
    return Certificate(
        set_name=state_set.name,
        n_states=len(state_set),
        k=k,
        cut=cut.label(layout),
        kappa=kappa,
        bound=bound,
        unitary_side=unitary_side,
        axiom=axiom,
        premises=premises,
        verdict=verdict,
    )


def all_bipartitions(parties) -> tuple[Cut, ...]:
    """Every bipartition of the parties, one canonical cut each.

    The smaller side goes left (ties keep the side holding the first party),
    and cuts are ordered by left-side size, then by party order, so reports
    list the 1 vs rest cuts first.
    """
    parties = tuple(parties)
    if len(parties) < 2:
        raise ValueError("bipartitions need at least two parties")
    index = {p: i for i, p in enumerate(parties)}
    cuts = []
    rest = parties[1:]
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            side = (parties[0],) + extra
            other = tuple(p for p in parties if p not in side)
            if not other:
                continue
            left = side if len(side) <= len(other) else other
            right = other if left is side else side
            cuts.append((len(left), tuple(index[p] for p in left), Cut.between(left, right)))
    cuts.sort(key=lambda item: item[:2])
    return tuple(c for _, _, c in cuts)


def aggregate_verdict(verdicts) -> str:
    """Combine per-cut verdicts: a failed premise dominates, then a missed
    bound, and only a clean sweep stays Certified."""
    verdicts = list(verdicts)
    if any(v == PREMISE_FAILS for v in verdicts):
        return PREMISE_FAILS
    if all(v == CERTIFIED for v in verdicts):
        return CERTIFIED
    return CONDITION_FAILS


def certify_genuine(request: CertificateRequest) -> GenuineResult:
    """Certify every bipartition and aggregate the verdicts.

    Meant for sets on three or more parties, where "genuinely
    unidentifiable" means no two-lab coalition ever helps; a two-party set
    degenerates to its single cut.
    """
    parties = request.state_set.parties
    certs = []
    for cut in all_bipartitions(parties):
        certs.append(
            certify_cut(
                CertificateRequest(
                    request.state_set, request.k, cut, request.tol, request.max_dim
                )
            )
        )
    return GenuineResult(tuple(certs), aggregate_verdict(c.verdict for c in certs))


def certify_basis_pairs(d: int) -> Certificate:
    """Certify pairs (k = 2) from the complete d-dimensional entangled basis.

    kappa = C(d^2, 2) = d^2 (d^2 - 1) / 2 always exceeds the bound d^2 for
    d >= 2, so the verdict is Certified for every valid d.
    """
    basis = ges_basis(d)
    return certify_cut(
        CertificateRequest(basis, 2, Cut.between(("A",), ("B",)))
    )
