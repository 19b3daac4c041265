"""Exact simulation of local measurement protocols.

A protocol is a finite sequence of steps. Each step names one party, who
measures their entire local block (all copies they hold) with a projective
measurement and broadcasts the outcome; a step may swap in a different
measurement depending on the transcript so far. Simulation is exhaustive:
every positive-probability branch is propagated exactly, so the reported
transcript distributions are not sampled, they are computed.

A classifier turns transcripts into subset verdicts. The two builtin
protocols cover the Bell-state tasks: ``bell32`` (paired Bell-basis
measurements for two distributed Bell states out of three candidates) and
``bell43`` (three-qubit GHZ-basis measurements for three out of four).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import AmbiguityError, CoverageError, LocalityError
from .families import bell, ghz3, named_states
from .statespace import ATOL, Layout, StateVector
from .subsets import MixedHypothesis, SubsetTask, hypothesis_ensemble, rho_subset

#: branches below this probability are treated as exactly zero
PRUNE_TOL = 1e-12

Transcript = tuple[tuple[str, int], ...]


def format_transcript(t: Transcript) -> str:
    """Render ``(("A", 1), ("B", 2))`` as ``"A:1 B:2"``."""
    return " ".join(f"{party}:{outcome}" for party, outcome in t) if t else "(empty)"


@dataclass(frozen=True, eq=False)
class Measurement:
    """A projective measurement on one party's local block.

    Projectors need not be rank one. Outcome labels default to 1..m.
    Invariant checks (Hermiticity, mutual orthogonality, completeness) are
    deliberately not run at construction; :func:`validate` reports them, so
    a malformed protocol can be built and then diagnosed.
    """

    party: str
    projectors: tuple[np.ndarray, ...]
    outcomes: tuple[int, ...] = ()

    def __post_init__(self):
        mats = []
        dim = None
        for i, p in enumerate(self.projectors):
            m = np.array(p, dtype=np.complex128)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"projector {i} is not a square matrix")
            if dim is None:
                dim = m.shape[0]
            elif m.shape[0] != dim:
                raise ValueError("projectors must share one dimension")
            m.flags.writeable = False
            mats.append(m)
        if not mats:
            raise ValueError("a measurement needs at least one projector")
        object.__setattr__(self, "projectors", tuple(mats))
        outcomes = tuple(self.outcomes) or tuple(range(1, len(mats) + 1))
        if len(outcomes) != len(mats):
            raise ValueError(f"{len(outcomes)} outcome labels for {len(mats)} projectors")
        if len(set(outcomes)) != len(outcomes):
            raise ValueError("outcome labels must be unique")
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def first_violation(self, tol: float = ATOL) -> str | None:
        """Description of the first broken measurement invariant, if any."""
        d = self.dim
        for i, p in enumerate(self.projectors):
            dev = float(np.max(np.abs(p - p.conj().T)))
            if dev > tol:
                return f"projector {i} is not Hermitian (deviation {dev:.3e})"
        for i in range(len(self.projectors)):
            for j in range(i + 1, len(self.projectors)):
                dev = float(np.max(np.abs(self.projectors[i] @ self.projectors[j])))
                if dev > tol:
                    return f"projectors {i} and {j} are not orthogonal (max entry {dev:.3e})"
        total = sum(self.projectors)
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > tol:
            return f"projectors do not sum to the identity (deviation {dev:.3e})"
        return None


def basis_measurement(party: str, vectors: Sequence, outcomes: Sequence[int] = ()) -> Measurement:
    """Rank-one measurement along the given orthonormal vectors."""
    projs = []
    for v in vectors:
        a = v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)
        projs.append(np.outer(a, a.conj()))
    return Measurement(party, tuple(projs), tuple(outcomes))


@dataclass(frozen=True, eq=False)
class ProtocolStep:
    """Default measurement plus optional transcript-conditioned overrides.

    ``variants`` maps a transcript prefix (the outcomes broadcast before this
    step) to the measurement used on that branch; prefixes without an entry
    fall back to the default, so every branch has a defined continuation.
    """

    measurement: Measurement
    variants: Mapping[Transcript, Measurement] = field(default_factory=dict)

    def choose(self, prefix: Transcript) -> Measurement:
        return self.variants.get(prefix, self.measurement)

    def all_measurements(self):
        yield "", self.measurement
        for prefix in sorted(self.variants):
            yield f"variant {format_transcript(prefix)}", self.variants[prefix]


@dataclass(frozen=True, eq=False)
class Protocol:
    name: str
    steps: tuple[ProtocolStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a protocol needs at least one step")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    location: str | None = None
    message: str | None = None


def validate(protocol: Protocol, tol: float = ATOL) -> ValidationReport:
    """Check every measurement invariant; report the first violation found."""
    for si, step in enumerate(protocol.steps, start=1):
        for tag, m in step.all_measurements():
            violation = m.first_violation(tol)
            if violation is not None:
                where = f"step {si} (party {m.party})"
                if tag:
                    where += f" {tag}"
                return ValidationReport(False, where, violation)
    return ValidationReport(True)


def _apply_block(amps: np.ndarray, dims: Sequence[int], positions: Sequence[int], matrix: np.ndarray) -> np.ndarray:
    """Apply a matrix to the given factor positions of a flat vector."""
    n = len(dims)
    rest = [i for i in range(n) if i not in positions]
    perm = list(positions) + rest
    t = amps.reshape(dims).transpose(perm)
    t = matrix @ t.reshape(matrix.shape[1], -1)
    t = t.reshape([dims[i] for i in perm])
    return t.transpose(np.argsort(perm)).reshape(-1)


def _check_locality(protocol: Protocol, layout: Layout) -> None:
    for si, step in enumerate(protocol.steps, start=1):
        for _, m in step.all_measurements():
            if m.party not in layout.parties:
                raise LocalityError(
                    f"step {si} measures party {m.party!r}, but the states "
                    f"involve only parties {','.join(layout.parties)}"
                )
            held = layout.party_dim(m.party)
            if m.dim != held:
                raise LocalityError(
                    f"step {si}: measurement acts on dimension {m.dim} but party "
                    f"{m.party} holds dimension {held}; a party may only measure "
                    "its own factors"
                )


@dataclass(frozen=True, eq=False)
class SimulationReport:
    """Exact transcript distributions, per hypothesis and per pure component.

    ``distributions[i]`` is the order-averaged distribution of hypothesis i;
    ``by_component[i][m]`` is the distribution when the states were handed
    out in the m-th ordering (aligned with ``hypotheses[i].orderings``).
    """

    hypotheses: tuple[MixedHypothesis, ...]
    distributions: tuple[dict, ...]
    by_component: tuple[tuple[dict, ...], ...]


def _run_pure(protocol: Protocol, layout: Layout, amps: np.ndarray, prune: float) -> dict:
    dims = layout.dims
    branches = [((), amps)]
    for step in protocol.steps:
        grown = []
        for prefix, vec in branches:
            m = step.choose(prefix)
            positions = layout.positions_of(m.party)
            for proj, outcome in zip(m.projectors, m.outcomes):
                out = _apply_block(vec, dims, positions, proj)
                if np.vdot(out, out).real >= prune:
                    grown.append((prefix + ((m.party, outcome),), out))
        branches = grown
    return {prefix: float(np.vdot(vec, vec).real) for prefix, vec in branches}


def _run_density(protocol: Protocol, layout: Layout, rho: np.ndarray, prune: float) -> dict:
    n = len(layout.factors)
    dims2 = layout.dims + layout.dims
    branches = [((), rho.reshape(-1))]
    for step in protocol.steps:
        grown = []
        for prefix, flat in branches:
            m = step.choose(prefix)
            positions = layout.positions_of(m.party)
            col_positions = [n + i for i in positions]
            for proj, outcome in zip(m.projectors, m.outcomes):
                out = _apply_block(flat, dims2, positions, proj)
                out = _apply_block(out, dims2, col_positions, proj.conj())
                trace = float(np.einsum("ii->", out.reshape(layout.dim, layout.dim)).real)
                if trace >= prune:
                    grown.append((prefix + ((m.party, outcome),), out))
        branches = grown
    return {
        prefix: float(np.einsum("ii->", flat.reshape(layout.dim, layout.dim)).real)
        for prefix, flat in branches
    }


def run_exact(
    protocol: Protocol,
    hypotheses: Sequence[MixedHypothesis],
    *,
    method: str = "components",
    prune: float = PRUNE_TOL,
) -> SimulationReport:
    """Propagate every branch of the protocol against every hypothesis.

    Parameters
    ----------
    method : {"components", "density"}
        "components" runs each pure ordering separately and averages, which
        also yields the per-ordering distributions used by the order
        blindness check. "density" projects the dense mixed state directly;
        it exists as an independent route for cross-checking and only works
        at dimensions where the dense matrix is allowed.
    prune : float
        Branches below this probability are dropped as exactly zero.
    """
    hypotheses = tuple(hypotheses)
    if not hypotheses:
        raise ValueError("run_exact needs at least one hypothesis")
    layout = hypotheses[0].layout
    for h in hypotheses[1:]:
        if h.layout != layout:
            raise ValueError("hypotheses must share the stacked layout")
    if method not in ("components", "density"):
        raise ValueError(f"unknown simulation method {method!r}")
    _check_locality(protocol, layout)

    distributions = []
    by_component = []
    for h in hypotheses:
        if method == "components":
            comp_dists = tuple(
                _run_pure(protocol, layout, c.amplitudes, prune) for c in h.components
            )
            merged: dict = {}
            for d in comp_dists:
                for t, p in d.items():
                    merged[t] = merged.get(t, 0.0) + p / len(comp_dists)
        else:
            comp_dists = tuple(
                _run_pure(protocol, layout, c.amplitudes, prune) for c in h.components
            )
            merged = _run_density(protocol, layout, h.rho.matrix, prune)
        distributions.append(merged)
        by_component.append(comp_dists)
    return SimulationReport(hypotheses, tuple(distributions), tuple(by_component))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: dict | None = None


@dataclass(frozen=True, eq=False)
class Classifier:
    """Total-on-reached-transcripts map from transcript to subset indices."""

    table: Mapping[Transcript, tuple[int, ...]]

    def __call__(self, t: Transcript) -> tuple[int, ...]:
        try:
            return self.table[t]
        except KeyError:
            raise CoverageError(
                f"classifier has no entry for transcript {format_transcript(t)}"
            ) from None

    def sorted_items(self):
        return sorted(self.table.items())


def perfect_identification(report: SimulationReport, classifier: Classifier) -> Verdict:
    """Did every reached transcript point back at the hypothesis that produced it?

    Raises CoverageError when the classifier is silent on a transcript that
    occurs with positive probability; returns a failing verdict with the
    first misclassified transcript as witness otherwise.
    """
    for h, dist in zip(report.hypotheses, report.distributions):
        for t in sorted(dist):
            assigned = classifier(t)
            if tuple(assigned) != h.subset_indices:
                return Verdict(
                    False,
                    {
                        "hypothesis": h.subset_indices,
                        "transcript": format_transcript(t),
                        "classified": tuple(assigned),
                    },
                )
    return Verdict(True)


def _total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(t, 0.0) - q.get(t, 0.0)) for t in keys)


def order_blindness_verdict(report: SimulationReport, tol: float = ATOL) -> Verdict:
    """Do all orderings of each subset induce the same transcript distribution?"""
    worst = 0.0
    witness = None
    for h, comp_dists in zip(report.hypotheses, report.by_component):
        for (ia, da), (ib, db) in itertools.combinations(enumerate(comp_dists), 2):
            tv = _total_variation(da, db)
            if tv > worst:
                worst = tv
                witness = {
                    "hypothesis": h.subset_indices,
                    "ordering_a": h.orderings[ia],
                    "ordering_b": h.orderings[ib],
                    "total_variation": tv,
                }
    if worst <= tol:
        return Verdict(True)
    return Verdict(False, witness)


def order_blindness(protocol: Protocol, task: SubsetTask, subset: Sequence[int], tol: float = ATOL) -> bool:
    """True when the protocol cannot tell the orderings of this subset apart."""
    report = run_exact(protocol, [rho_subset(task, tuple(subset))])
    return order_blindness_verdict(report, tol).ok


def derive_classifier(report: SimulationReport, *, on_ambiguity: str = "error") -> Classifier:
    """Tally which subsets reach which transcripts and build the decision table.

    A transcript claimed by two different subsets makes perfect
    identification impossible. With ``on_ambiguity="error"`` (the default)
    that raises AmbiguityError naming the transcript and its claimants; with
    ``"first"`` the table routes the transcript to the earliest claimant in
    enumeration order, which documents the collision rather than hiding it.
    """
    if on_ambiguity not in ("error", "first"):
        raise ValueError(f"unknown ambiguity policy {on_ambiguity!r}")
    claims: dict[Transcript, list[tuple[int, ...]]] = {}
    for h, dist in zip(report.hypotheses, report.distributions):
        for t in dist:
            claimants = claims.setdefault(t, [])
            if h.subset_indices not in claimants:
                claimants.append(h.subset_indices)
    ambiguous = sorted(t for t, c in claims.items() if len(c) > 1)
    if ambiguous and on_ambiguity == "error":
        t = ambiguous[0]
        raise AmbiguityError(
            f"transcript {format_transcript(t)} occurs under "
            f"{len(claims[t])} different subsets: {claims[t]}",
            transcript=t,
            claimants=tuple(claims[t]),
        )
    return Classifier({t: c[0] for t, c in claims.items()})


# ---------------------------------------------------------------------------
# builtin protocols


def _bell_measurement(party: str) -> Measurement:
    return basis_measurement(party, [bell(i) for i in range(1, 5)])


def _ghz3_measurement(party: str) -> Measurement:
    return basis_measurement(party, [ghz3(a) for a in range(1, 9)])


def _t2(a: int, b: int) -> Transcript:
    return (("A", a), ("B", b))


# Decision table for two distributed Bell states out of {B1, B2, B3}:
# outcome pair (Alice, Bob) -> candidate pair, 0-based into that triple.
# Each hypothesis reaches exactly four pairs, each with probability 1/4, and
# no pair is reachable under two hypotheses.
_BELL32_TABLE: dict[Transcript, tuple[int, ...]] = {
    _t2(1, 2): (0, 1), _t2(2, 1): (0, 1), _t2(3, 4): (0, 1), _t2(4, 3): (0, 1),
    _t2(1, 4): (1, 2), _t2(2, 3): (1, 2), _t2(3, 2): (1, 2), _t2(4, 1): (1, 2),
    _t2(1, 3): (0, 2), _t2(2, 4): (0, 2), _t2(3, 1): (0, 2), _t2(4, 2): (0, 2),
}


def builtin_bell32() -> tuple[Protocol, Classifier]:
    """Paired Bell-basis measurements with the frozen decision table.

    Alice measures her two qubits in the Bell basis, then Bob does the same;
    the classifier identifies which pair out of {B1, B2, B3} was distributed.
    The same protocol run on any single pair in both orders produces one and
    the same distribution, so it identifies the pair without ever learning
    the order.
    """
    protocol = Protocol(
        "bell32",
        (ProtocolStep(_bell_measurement("A")), ProtocolStep(_bell_measurement("B"))),
    )
    return protocol, Classifier(dict(_BELL32_TABLE))


def builtin_bell32_variants(triple: Sequence[int]) -> tuple[Protocol, Classifier]:
    """The same measurement scheme retargeted at any Bell triple.

    ``triple`` lists three distinct Bell indices from 1..4. The classifier is
    rebuilt by exhaustive tallying over that triple's three pair hypotheses
    and construction fails with AmbiguityError if two pairs ever share a
    transcript; all four triples tally cleanly.
    """
    triple = tuple(sorted(triple))
    if len(triple) != 3 or len(set(triple)) != 3 or not all(1 <= i <= 4 for i in triple):
        raise ValueError(f"need three distinct Bell indices from 1..4, got {triple}")
    protocol = Protocol(
        "bell32",
        (ProtocolStep(_bell_measurement("A")), ProtocolStep(_bell_measurement("B"))),
    )
    task = SubsetTask(named_states([f"B{i}" for i in triple]), 2)
    report = run_exact(protocol, hypothesis_ensemble(task))
    return protocol, derive_classifier(report)


def _t43(a: int, b: int) -> Transcript:
    return (("A", a), ("B", b))


# Tally table for three distributed Bell states out of all four, with both
# parties measuring their three-qubit blocks in the ghz3 basis. The tally is
# NOT unambiguous: each transcript below is reached by two different
# 3-subsets ({0,1,2} with {0,2,3}, and {0,1,3} with {1,2,3}, whose transcript
# distributions coincide exactly), so the frozen table routes every
# transcript to the earliest claimant and perfect identification fails.
# Machine-tallied from the exhaustive simulation (48 reached transcripts,
# each with probability 1/24 under each of its two claimants).
_BELL43_TABLE: dict[Transcript, tuple[int, ...]] = {
    _t43(1, 3): (0, 1, 3),
    _t43(1, 4): (0, 1, 2),
    _t43(1, 5): (0, 1, 3),
    _t43(1, 6): (0, 1, 2),
    _t43(1, 7): (0, 1, 3),
    _t43(1, 8): (0, 1, 2),
    _t43(2, 3): (0, 1, 2),
    _t43(2, 4): (0, 1, 3),
    _t43(2, 5): (0, 1, 2),
    _t43(2, 6): (0, 1, 3),
    _t43(2, 7): (0, 1, 2),
    _t43(2, 8): (0, 1, 3),
    _t43(3, 1): (0, 1, 3),
    _t43(3, 2): (0, 1, 2),
    _t43(3, 5): (0, 1, 3),
    _t43(3, 6): (0, 1, 2),
    _t43(3, 7): (0, 1, 3),
    _t43(3, 8): (0, 1, 2),
    _t43(4, 1): (0, 1, 2),
    _t43(4, 2): (0, 1, 3),
    _t43(4, 5): (0, 1, 2),
    _t43(4, 6): (0, 1, 3),
    _t43(4, 7): (0, 1, 2),
    _t43(4, 8): (0, 1, 3),
    _t43(5, 1): (0, 1, 3),
    _t43(5, 2): (0, 1, 2),
    _t43(5, 3): (0, 1, 3),
    _t43(5, 4): (0, 1, 2),
    _t43(5, 7): (0, 1, 3),
    _t43(5, 8): (0, 1, 2),
    _t43(6, 1): (0, 1, 2),
    _t43(6, 2): (0, 1, 3),
    _t43(6, 3): (0, 1, 2),
    _t43(6, 4): (0, 1, 3),
    _t43(6, 7): (0, 1, 2),
    _t43(6, 8): (0, 1, 3),
    _t43(7, 1): (0, 1, 3),
    _t43(7, 2): (0, 1, 2),
    _t43(7, 3): (0, 1, 3),
    _t43(7, 4): (0, 1, 2),
    _t43(7, 5): (0, 1, 3),
    _t43(7, 6): (0, 1, 2),
    _t43(8, 1): (0, 1, 2),
    _t43(8, 2): (0, 1, 3),
    _t43(8, 3): (0, 1, 2),
    _t43(8, 4): (0, 1, 3),
    _t43(8, 5): (0, 1, 2),
    _t43(8, 6): (0, 1, 3),
}


def builtin_bell43() -> tuple[Protocol, Classifier]:
    """Three-qubit GHZ-basis tally for three Bell states out of four.

    Both parties measure their three-qubit blocks in the ghz3 basis and
    tally outcomes. Exhaustive simulation shows this scheme cannot work:
    the two subset pairs named in the table comment produce identical
    transcript distributions, and individual orderings of a subset are
    distinguishable from one another, so both the identification and the
    order-blindness verdicts come out false. The classifier ships anyway,
    frozen with first-claimant resolution, so the failure is reproducible.
    """
    protocol = Protocol(
        "bell43",
        (ProtocolStep(_ghz3_measurement("A")), ProtocolStep(_ghz3_measurement("B"))),
    )
    return protocol, Classifier(dict(_BELL43_TABLE))


#: builtin protocols addressable from scripts
PROTOCOLS = {"bell32": builtin_bell32, "bell43": builtin_bell43}
