"""Induced mappings of bus-mediated transfer: matrices, classification, search.

A valid interaction spec induces, for every bus outcome, a permutation of
Bob's register relative to Alice's input.  This module builds the
pre-measurement matrix that tabulates those outcomes, extracts and classifies
the outcome permutations (local vs entangling, maximally entangling or not),
and searches structured families of operator sets for specs with a requested
character.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .perms import (
    OperatorSet,
    Permutation,
    ValidityReport,
    build_hv_sets,
    combined_operators,
    compose,
    enumerate_derangements,
    identity,
    validate_interaction_sets,
)

__all__ = [
    "DEFAULT_SEARCH_BUDGET",
    "InteractionSpec",
    "InvalidInteractionError",
    "MappingClass",
    "PreMeasurementMatrix",
    "SearchHit",
    "SearchResult",
    "block_criteria",
    "classify_mapping",
    "factor_composite",
    "is_locally_factorizable",
    "is_maximally_entangling",
    "outcome_permutation",
    "premeasurement_matrix",
    "search_sets",
    "strip_local_factor",
]

DEFAULT_SEARCH_BUDGET = 9**4
SEARCH_FAMILIES = ("pairwise+cyclic", "hv_products", "shift_powers", "exhaustive")
SEARCH_OBJECTIVES = ("any-valid", "local", "entangling", "maximal")


class InvalidInteractionError(ValueError):
    """An interaction spec failed Hilbert-Schmidt orthogonality validation."""

    def __init__(self, party: str, report: ValidityReport):
        self.party = party
        self.report = report
        super().__init__(
            f"{party} operator sets are invalid: combinations {report.violating_pair} "
            "share fixed points"
        )


@dataclass(frozen=True, slots=True)
class InteractionSpec:
    """Operator sets for both parties of a bus-mediated protocol.

    Structural consistency (counts and dimensions) is enforced on
    construction; Hilbert-Schmidt validity is checked by :meth:`validate`,
    which every simulation and matrix entry point calls first.
    """

    d: int
    m: int
    alice_sets: tuple[OperatorSet, ...]
    bob_sets: tuple[OperatorSet, ...]

    def __post_init__(self) -> None:
        if self.d < 2 or self.m < 1:
            raise ValueError("need d >= 2 and m >= 1")
        for party, sets in (("alice", self.alice_sets), ("bob", self.bob_sets)):
            if len(sets) != self.m:
                raise ValueError(f"{party} needs {self.m} operator sets, got {len(sets)}")
            for j, opset in enumerate(sets):
                if opset.subsystem_dim != self.d:
                    raise ValueError(f"{party} set {j} has subsystem_dim {opset.subsystem_dim}")
                if opset.bus_dim != self.bus_dim:
                    raise ValueError(f"{party} set {j} acts on {opset.bus_dim} bus labels")

    @property
    def bus_dim(self) -> int:
        return self.d**self.m

    def validate(self) -> tuple[ValidityReport, ValidityReport]:
        """Validate both parties; raise on the first invalid one.

        Raises:
            InvalidInteractionError: carrying the failing party's report.
        """
        reports = []
        for party, sets in (("alice", self.alice_sets), ("bob", self.bob_sets)):
            report = validate_interaction_sets(sets, self.d, self.m)
            if not report.valid:
                raise InvalidInteractionError(party, report)
            reports.append(report)
        return reports[0], reports[1]


@dataclass(frozen=True, slots=True)
class PreMeasurementMatrix:
    """Bus labels just before the final computational measurement.

    Rows are indexed by the measuring party's conditional combination (Bob's
    in transfer, Alice's in teleport), columns by the preparing party's
    combination; both use composite odometer order.  ``entries[r][c]`` is the
    bus label on that branch.  For a valid spec every row and column is a
    permutation of the labels (a Latin square).
    """

    d: int
    m: int
    direction: str
    entries: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return self.d**self.m

    def is_latin(self) -> bool:
        full = set(range(self.size))
        rows_ok = all(set(row) == full for row in self.entries)
        cols_ok = all({row[c] for row in self.entries} == full for c in range(self.size))
        return rows_ok and cols_ok


def premeasurement_matrix(spec: InteractionSpec, direction: str = "transfer") -> PreMeasurementMatrix:
    """Tabulate the bus label for every (preparer, measurer) branch.

    In transfer, Alice's combination ``c`` sends the bus to label ``A_c(0)``
    and Bob's combination ``r`` then takes it to ``B_r(A_c(0))``.  In
    teleport Bob couples first, so the entry is ``A_c(B_r(0))``.

    Raises:
        InvalidInteractionError: the spec fails validation or the resulting
            table is not Latin.
    """
    if direction not in ("transfer", "teleport"):
        raise ValueError(f"unknown direction {direction!r}")
    spec.validate()
    alice = combined_operators(spec.alice_sets)
    bob = combined_operators(spec.bob_sets)
    if direction == "transfer":
        entries = tuple(tuple(b(a(0)) for a in alice) for b in bob)
    else:
        entries = tuple(tuple(a(b(0)) for a in alice) for b in bob)
    matrix = PreMeasurementMatrix(spec.d, spec.m, direction, entries)
    if not matrix.is_latin():
        raise InvalidInteractionError(
            "joint", ValidityReport(valid=False, violating_pair=None, fixed_point_counts=())
        )
    return matrix


def outcome_permutation(matrix: PreMeasurementMatrix, bus_label: int) -> Permutation:
    """Permutation linking preparer combinations to measurer combinations for
    one bus outcome: column ``c`` maps to the row ``r`` with
    ``entries[r][c] == bus_label``.

    Raises:
        ValueError: the label is absent from some column (non-Latin input).
    """
    if not 0 <= bus_label < matrix.size:
        raise ValueError(f"bus label {bus_label} outside range(0, {matrix.size})")
    images = []
    for c in range(matrix.size):
        hits = [r for r in range(matrix.size) if matrix.entries[r][c] == bus_label]
        if len(hits) != 1:
            raise ValueError(f"bus label {bus_label} appears {len(hits)} times in column {c}")
        images.append(hits[0])
    return Permutation(tuple(images))


def factor_composite(p: Permutation, dims: tuple[int, ...] | list[int]) -> list[Permutation] | None:
    """Factor a composite-label permutation into independent per-subsystem
    permutations, or return None when impossible.

    ``dims`` are the subsystem dimensions in most-significant-first order and
    must multiply to ``p.size``.
    """
    dims = tuple(int(d) for d in dims)
    total = 1
    for d in dims:
        total *= d
    if total != p.size:
        raise ValueError(f"dims {dims} do not multiply to {p.size}")
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides.reverse()
    factors = []
    for j, d in enumerate(dims):
        images = [p(k * strides[j]) // strides[j] % d for k in range(d)]
        if sorted(images) != list(range(d)):
            return None
        factors.append(Permutation(tuple(images)))
    for labels in itertools.product(*(range(d) for d in dims)):
        composite = sum(k * s for k, s in zip(labels, strides))
        expected = sum(f(k) * s for f, k, s in zip(factors, labels, strides))
        if p(composite) != expected:
            return None
    return factors


def is_locally_factorizable(p: Permutation, d: int) -> tuple[bool, tuple[Permutation, Permutation] | None]:
    """Whether a two-subsystem permutation is a product of one permutation per
    subsystem; returns the factors when it is."""
    if p.size != d * d:
        raise ValueError(f"permutation acts on {p.size} labels, expected {d * d}")
    factors = factor_composite(p, (d, d))
    if factors is None:
        return False, None
    return True, (factors[0], factors[1])


def strip_local_factor(p: Permutation, d: int) -> tuple[tuple[Permutation, Permutation], Permutation]:
    """Split ``p = (a (x) b) o residual`` with the canonical local factor.

    ``a`` is read off the first output digit along column 0 and ``b`` off the
    second output digit along row 0; when either read-off is not a bijection
    the local factor defaults to the identity pair and the residual is ``p``
    itself.  For a locally factorizable ``p`` the residual is the identity;
    for the entangling branches of valid two-qudit specs the residual is the
    canonical entangling core (a controlled shift).
    """
    if p.size != d * d:
        raise ValueError(f"permutation acts on {p.size} labels, expected {d * d}")
    a_images = [p(i * d) // d for i in range(d)]
    b_images = [p(j) % d for j in range(d)]
    if sorted(a_images) != list(range(d)) or sorted(b_images) != list(range(d)):
        ident = identity(d)
        return (ident, ident), p
    a = Permutation(tuple(a_images))
    b = Permutation(tuple(b_images))
    local = Permutation(tuple(a(i) * d + b(j) for i in range(d) for j in range(d)))
    residual = compose(local.inverse(), p)
    return (a, b), residual


def _exchange(d: int) -> Permutation:
    return Permutation(tuple((s % d) * d + s // d for s in range(d * d)))


def block_criteria(p: Permutation, d: int) -> tuple[bool, bool, bool, bool]:
    """The four block-structure criteria on the ``d**2 x d**2`` permutation
    matrix of ``p`` partitioned into ``d x d`` blocks.

    Reading: matrix row = output label ``p(s)``, column = input label ``s``;
    block row/column = leading digit, position within a block = trailing
    digit.  Criteria: (1) every block holds exactly one entry, (2) all blocks
    differ as patterns, (3) within each block row the entries occupy distinct
    sub-columns, (4) within each block column the entries occupy distinct
    sub-rows.  All four hold exactly when both output digits are Latin-square
    functions of the input digits.
    """
    if p.size != d * d:
        raise ValueError(f"permutation acts on {p.size} labels, expected {d * d}")
    block_entries: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for col in range(d * d):
        row = p(col)
        key = (row // d, col // d)
        block_entries.setdefault(key, []).append((row % d, col % d))
    one_entry_each = len(block_entries) == d * d and all(
        len(v) == 1 for v in block_entries.values()
    )
    patterns = [
        frozenset(block_entries.get((block_row, block_col), ()))
        for block_row in range(d)
        for block_col in range(d)
    ]
    all_blocks_differ = len(set(patterns)) == d * d
    row_subcols_ok = all(
        len(
            subcols := [
                sc
                for block_col in range(d)
                for _, sc in block_entries.get((block_row, block_col), ())
            ]
        )
        == len(set(subcols))
        for block_row in range(d)
    )
    col_subrows_ok = all(
        len(
            subrows := [
                sr
                for block_row in range(d)
                for sr, _ in block_entries.get((block_row, block_col), ())
            ]
        )
        == len(set(subrows))
        for block_col in range(d)
    )
    return one_entry_each, all_blocks_differ, row_subcols_ok, col_subrows_ok


def is_maximally_entangling(p: Permutation, d: int) -> bool:
    """Whether a two-subsystem permutation gate creates maximal average
    entanglement from product inputs.

    For ``d >= 3`` this is the four block criteria of :func:`block_criteria`.
    No two-qubit permutation satisfies those literally, yet the
    entangling-power-maximal two-qubit classes exist (the controlled-flip
    classes and their exchange composites); at ``d == 2`` the equivalent test
    is that neither ``p`` nor ``exchange o p`` factors into local
    permutations.
    """
    if p.size != d * d:
        raise ValueError(f"permutation acts on {p.size} labels, expected {d * d}")
    if d == 2:
        local, _ = is_locally_factorizable(p, d)
        swapped, _ = is_locally_factorizable(compose(_exchange(d), p), d)
        return not local and not swapped
    return all(block_criteria(p, d))


@dataclass(frozen=True, slots=True)
class MappingClass:
    """Classification of a spec's induced mapping across all bus outcomes."""

    kind: str
    per_outcome: tuple[str, ...]
    maximal: bool


def classify_mapping(
    source: InteractionSpec | PreMeasurementMatrix, d: int | None = None
) -> MappingClass:
    """Classify every bus outcome of a mapping as local or entangling.

    Accepts either an :class:`InteractionSpec` (its transfer matrix is built
    first) or a :class:`PreMeasurementMatrix`; ``d`` is an optional
    cross-check against the matrix dimension.  ``kind`` is ``"local"`` /
    ``"entangling"`` when all outcomes agree and ``"combined"`` otherwise;
    ``maximal`` is True when every outcome permutation is maximally
    entangling.

    Raises:
        InvalidInteractionError: the spec fails validation.
        ValueError: ``d`` disagrees with the matrix dimension.
    """
    if isinstance(source, InteractionSpec):
        matrix = premeasurement_matrix(source, "transfer")
    else:
        matrix = source
    if d is not None and d != matrix.d:
        raise ValueError(f"matrix has subsystem dimension {matrix.d}, not {d}")
    labels = []
    maximal = True
    for outcome in range(matrix.size):
        sigma = outcome_permutation(matrix, outcome)
        if matrix.m == 2:
            local, _ = is_locally_factorizable(sigma, matrix.d)
            maximal = maximal and is_maximally_entangling(sigma, matrix.d)
        else:
            local = factor_composite(sigma, (matrix.d,) * matrix.m) is not None
            maximal = False
        labels.append("local" if local else "entangling")
    if all(label == "local" for label in labels):
        kind = "local"
    elif all(label == "entangling" for label in labels):
        kind = "entangling"
    else:
        kind = "combined"
    return MappingClass(kind=kind, per_outcome=tuple(labels), maximal=maximal)


@dataclass(frozen=True, slots=True)
class SearchHit:
    """One valid spec found by :func:`search_sets`, with its classification."""

    spec: InteractionSpec
    mapping: MappingClass


@dataclass(frozen=True, slots=True)
class SearchResult:
    """Hits plus bookkeeping; ``budget_exceeded`` marks a truncated search."""

    hits: tuple[SearchHit, ...]
    examined: int
    budget_exceeded: bool


def _cyclic_set(generator: Permutation, d: int) -> OperatorSet | None:
    members = [generator.power(k) for k in range(d)]
    if len({m.mapping for m in members}) != d:
        return None
    return OperatorSet(d, tuple(members))


def _party_candidates(d: int, m: int, family: str):
    """Yield candidate operator-set tuples for one party, deterministic order."""
    bus = d**m
    if family == "pairwise+cyclic":
        if d != 2 or m != 2:
            raise ValueError("pairwise+cyclic family is defined for d=2, m=2")
        generators = enumerate_derangements(4)
        slot_sets = [OperatorSet(2, (identity(4), g)) for g in generators]
        yield from itertools.product(slot_sets, repeat=m)
    elif family == "hv_products":
        if m != 2:
            raise ValueError("hv_products family is defined for m=2")
        h, v = (s.members[1] for s in build_hv_sets(d))
        slot_sets = []
        for n, k in itertools.product(range(d), repeat=2):
            if (n, k) == (0, 0):
                continue
            generator = compose(v.power(n), h.power(k))
            opset = _cyclic_set(generator, d)
            if opset is not None:
                slot_sets.append(opset)
        yield from itertools.product(slot_sets, repeat=m)
    elif family == "shift_powers":
        shift = Permutation(tuple((s + 1) % bus for s in range(bus)))
        slot_sets = []
        for stride in range(1, bus):
            opset = _cyclic_set(shift.power(stride), d)
            if opset is not None:
                slot_sets.append(opset)
        yield from itertools.product(slot_sets, repeat=m)
    elif family == "exhaustive":
        generators = enumerate_derangements(bus)

        def slots():
            for choice in itertools.permutations(generators, d - 1):
                yield OperatorSet(d, (identity(bus),) + tuple(choice))

        yield from _lazy_product(slots, m)
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {SEARCH_FAMILIES}")


def _lazy_product(factory, repeat: int):
    """Cartesian power of a restartable iterable without materializing it;
    unlike ``itertools.product`` this stays lazy for huge factor spaces."""
    if repeat == 0:
        yield ()
        return
    for head in factory():
        for tail in _lazy_product(factory, repeat - 1):
            yield (head,) + tail


def search_sets(
    d: int,
    family: str,
    objective: str,
    m: int = 2,
    budget: int | None = None,
) -> SearchResult:
    """Search a structured family of operator sets for specs matching an
    objective.

    Candidates pair every valid Alice family with every valid Bob family from
    the same search space; a candidate spec counts toward the budget when its
    per-party validity is evaluated.  Hits carry the spec and its mapping
    classification.

    Args:
        d: qudit dimension.
        family: one of ``pairwise+cyclic`` (two qubits, one derangement per
            slot), ``hv_products`` (cyclic sets generated by row/column step
            products), ``shift_powers`` (cyclic sets generated by powers of
            the full bus cycle), ``exhaustive`` (every assignment of distinct
            derangements to set members; budget-bound).
        objective: ``any-valid``, ``local``, ``entangling`` or ``maximal``.
        m: qudits per party.
        budget: maximum number of candidate specs to examine; default 6561.

    Returns:
        SearchResult; ``budget_exceeded`` is True when candidates remained.
    """
    if objective not in SEARCH_OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {SEARCH_OBJECTIVES}")
    limit = DEFAULT_SEARCH_BUDGET if budget is None else budget
    if limit < 1:
        raise ValueError("budget must be positive")

    validity_cache: dict[tuple, bool] = {}

    def party_valid(sets: tuple[OperatorSet, ...]) -> bool:
        key = tuple(tuple(member.mapping for member in opset.members) for opset in sets)
        cached = validity_cache.get(key)
        if cached is None:
            cached = validate_interaction_sets(sets, d, m).valid
            validity_cache[key] = cached
        return cached

    def candidate_specs():
        for alice_choice in _party_candidates(d, m, family):
            for bob_choice in _party_candidates(d, m, family):
                yield alice_choice, bob_choice

    hits: list[SearchHit] = []
    examined = 0
    exceeded = False
    for alice_sets, bob_sets in candidate_specs():
        if examined >= limit:
            exceeded = True
            break
        examined += 1
        if not (party_valid(alice_sets) and party_valid(bob_sets)):
            continue
        spec = InteractionSpec(d=d, m=m, alice_sets=alice_sets, bob_sets=bob_sets)
        mapping = classify_mapping(spec)
        keep = (
            objective == "any-valid"
            or (objective == "local" and mapping.kind == "local")
            or (objective == "entangling" and mapping.kind == "entangling")
            or (objective == "maximal" and mapping.maximal)
        )
        if keep:
            hits.append(SearchHit(spec=spec, mapping=mapping))
    return SearchResult(hits=tuple(hits), examined=examined, budget_exceeded=exceeded)
