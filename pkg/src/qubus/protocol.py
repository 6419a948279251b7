"""Bus-mediated state transfer and teleportation with feed-forward.

Transfer: the bus starts in label 0, Alice conditionally couples her qudits
in order and measures them in the conjugate basis; Bob prepares uniform
blanks, couples his qudits, and measures the bus computationally.  Teleport
runs Bob's couplings first, ships the bus to Alice, and lets Alice measure
both her qudits (conjugate) and the bus (computational).  Either way the bus
outcome selects a permutation linking the two parties' conditional
combinations, and the feed-forward consists of that permutation's inverse
plus single-qudit phase corrections for Alice's conjugate outcomes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .mappings import (
    InteractionSpec,
    PreMeasurementMatrix,
    classify_mapping,
    factor_composite,
    outcome_permutation,
    premeasurement_matrix,
    strip_local_factor,
)
from .perms import Permutation, format_cycles, identity
from .states import (
    MeasurementRecord,
    StateVector,
    ZeroProbabilityError,
    apply_conditional,
    apply_label_permutation,
    apply_local,
    basis_state,
    fidelity,
    measure,
    random_state,
    tensor,
    uniform_state,
)

__all__ = [
    "Correction",
    "ProtocolTrace",
    "RepeatStats",
    "derive_feedforward",
    "repeat_until_entangled",
    "run_teleport",
    "run_transfer",
    "target_gate_label",
]

FIDELITY_ATOL = 1e-12
DEFAULT_MAX_ROUNDS = 64


@dataclass(frozen=True, slots=True)
class Correction:
    """Receiver-side feed-forward: relabel the register by ``permutation``
    (the inverse of the bus outcome's permutation), then raise each qudit's
    phase gate to the matching conjugate outcome."""

    permutation: Permutation
    phase_powers: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ProtocolTrace:
    """Full record of one protocol branch.

    ``target_gate`` names the residual gate the branch implements once local
    corrections are absorbed (``"identity"`` for faithful transfer, ``"cnot"``
    for the two-qubit controlled flip, ``"perm:<cycles>"`` otherwise);
    ``fidelity`` compares Bob's feed-forward-completed state against
    ``target_gate`` applied to the input.
    """

    direction: str
    records: tuple[MeasurementRecord, ...]
    alice_outcomes: tuple[int, ...]
    bus_outcome: int
    correction: Correction
    target_gate: str
    fidelity: float
    probability: float


@dataclass(frozen=True, slots=True)
class RepeatStats:
    """Outcome of repeated transfer attempts until an entangling branch."""

    rounds_per_trial: tuple[int, ...]
    successes: int
    mean_rounds: float
    min_fidelity: float


def derive_feedforward(
    matrix: PreMeasurementMatrix, bus_outcome: int, phase_outcomes: tuple[int, ...] | list[int]
) -> Correction:
    """Correction for one branch: inverse of the bus outcome's permutation
    plus the conjugate-outcome phase powers.

    Raises:
        ValueError: the bus outcome is inconsistent with a Latin matrix.
    """
    sigma = outcome_permutation(matrix, bus_outcome)
    return Correction(permutation=sigma.inverse(), phase_powers=tuple(int(a) for a in phase_outcomes))


def target_gate_label(sigma: Permutation, d: int, m: int) -> str:
    """Name the gate a bus outcome implements on the receiver, local factors
    stripped: ``identity``, ``cnot`` (two qubits), or ``perm:<cycles>``."""
    if m == 2:
        _, residual = strip_local_factor(sigma, d)
    else:
        factors = factor_composite(sigma, (d,) * m)
        residual = identity(sigma.size) if factors is not None else sigma
    if residual.is_identity():
        return "identity"
    if d == 2 and m == 2 and residual.mapping in ((0, 1, 3, 2), (0, 3, 2, 1)):
        return "cnot"
    return f"perm:{format_cycles(residual)}"


def _branch_transfer(
    input_state: StateVector,
    spec: InteractionSpec,
    matrix: PreMeasurementMatrix,
    forced: tuple[tuple[int, ...] | None, int | None],
    rng: np.random.Generator | None,
) -> tuple[ProtocolTrace, StateVector]:
    forced_alice, forced_bus = forced
    state = tensor(input_state, basis_state((spec.bus_dim,), 0))
    for j in range(spec.m):
        state = apply_conditional(state, j, spec.alice_sets[j])
    records: list[MeasurementRecord] = []
    alice_outcomes: list[int] = []
    for j in range(spec.m):
        forced_outcome = None if forced_alice is None else forced_alice[j]
        state, record = measure(state, 0, "conjugate", forced_outcome=forced_outcome, rng=rng)
        records.append(replace(record, subsystem=j))
        alice_outcomes.append(record.outcome)
    state = tensor(uniform_state((spec.d,) * spec.m), state)
    for j in range(spec.m):
        state = apply_conditional(state, j, spec.bob_sets[j])
    state, record = measure(
        state, spec.m, "computational", forced_outcome=forced_bus, rng=rng
    )
    records.append(record)
    return _finish_branch(
        "transfer", input_state, spec, matrix, state, records, alice_outcomes, record.outcome
    )


def _branch_teleport(
    input_state: StateVector,
    spec: InteractionSpec,
    matrix: PreMeasurementMatrix,
    forced: tuple[tuple[int, ...] | None, int | None],
    rng: np.random.Generator | None,
) -> tuple[ProtocolTrace, StateVector]:
    forced_alice, forced_bus = forced
    bob_side = tensor(uniform_state((spec.d,) * spec.m), basis_state((spec.bus_dim,), 0))
    for j in range(spec.m):
        bob_side = apply_conditional(bob_side, j, spec.bob_sets[j])
    state = tensor(input_state, bob_side)
    for j in range(spec.m):
        state = apply_conditional(state, j, spec.alice_sets[j])
    records: list[MeasurementRecord] = []
    alice_outcomes: list[int] = []
    for j in range(spec.m):
        forced_outcome = None if forced_alice is None else forced_alice[j]
        state, record = measure(state, 0, "conjugate", forced_outcome=forced_outcome, rng=rng)
        records.append(replace(record, subsystem=j))
        alice_outcomes.append(record.outcome)
    state, record = measure(
        state, spec.m, "computational", forced_outcome=forced_bus, rng=rng
    )
    records.append(record)
    return _finish_branch(
        "teleport", input_state, spec, matrix, state, records, alice_outcomes, record.outcome
    )


def _finish_branch(
    direction: str,
    input_state: StateVector,
    spec: InteractionSpec,
    matrix: PreMeasurementMatrix,
    raw_state: StateVector,
    records: list[MeasurementRecord],
    alice_outcomes: list[int],
    bus_outcome: int,
) -> tuple[ProtocolTrace, StateVector]:
    correction = derive_feedforward(matrix, bus_outcome, alice_outcomes)
    corrected = apply_label_permutation(raw_state, correction.permutation)
    for j, power in enumerate(correction.phase_powers):
        corrected = apply_local(corrected, j, ("z", power))
    sigma = correction.permutation.inverse()
    target = target_gate_label(sigma, spec.d, spec.m)
    branch_fidelity = fidelity(corrected, input_state)
    probability = math.prod(record.probability for record in records)
    trace = ProtocolTrace(
        direction=direction,
        records=tuple(records),
        alice_outcomes=tuple(alice_outcomes),
        bus_outcome=bus_outcome,
        correction=correction,
        target_gate=target,
        fidelity=branch_fidelity,
        probability=probability,
    )
    return trace, corrected


def _run(
    direction: str,
    input_state: StateVector,
    spec: InteractionSpec,
    policy: str,
    seed: int | None,
    alice_outcomes: tuple[int, ...] | list[int] | None,
    bus_outcome: int | None,
) -> ProtocolTrace | list[ProtocolTrace]:
    if input_state.dims != (spec.d,) * spec.m:
        raise ValueError(f"input dims {input_state.dims} do not match spec {(spec.d,) * spec.m}")
    matrix = premeasurement_matrix(spec, direction)
    branch = _branch_transfer if direction == "transfer" else _branch_teleport
    if policy == "sample":
        rng = np.random.default_rng(seed)
        trace, _ = branch(input_state, spec, matrix, (None, None), rng)
        return trace
    if policy == "forced":
        if alice_outcomes is None or bus_outcome is None:
            raise ValueError("forced policy needs alice_outcomes and bus_outcome")
        if len(alice_outcomes) != spec.m:
            raise ValueError(f"need {spec.m} conjugate outcomes, got {len(alice_outcomes)}")
        trace, _ = branch(
            input_state, spec, matrix, (tuple(int(a) for a in alice_outcomes), int(bus_outcome)), None
        )
        return trace
    if policy == "enumerate":
        traces = []
        for digits in itertools.product(range(spec.d), repeat=spec.m):
            for bus in range(spec.bus_dim):
                try:
                    trace, _ = branch(input_state, spec, matrix, (digits, bus), None)
                except ZeroProbabilityError:
                    continue
                traces.append(trace)
        return traces
    raise ValueError(f"unknown policy {policy!r}; expected sample, forced, or enumerate")


def run_transfer(
    input_state: StateVector,
    spec: InteractionSpec,
    policy: str = "sample",
    seed: int | None = None,
    alice_outcomes: tuple[int, ...] | list[int] | None = None,
    bus_outcome: int | None = None,
) -> ProtocolTrace | list[ProtocolTrace]:
    """Run bus-mediated transfer of ``input_state`` from Alice to Bob.

    Args:
        input_state: state of Alice's ``m`` qudits, dims ``(d,)*m``.
        spec: interaction spec; validated before any simulation.
        policy: ``"sample"`` (one Born-sampled branch), ``"forced"`` (fixed
            outcomes), or ``"enumerate"`` (every branch with nonzero
            probability: conjugate outcomes in odometer order, then bus
            outcome ascending).
        seed: RNG seed for ``sample``; each run owns its generator.
        alice_outcomes: conjugate outcomes for ``forced``.
        bus_outcome: bus outcome for ``forced``.

    Returns:
        One ProtocolTrace, or a list of them under ``enumerate``.

    Raises:
        InvalidInteractionError: the spec fails validation.
        ZeroProbabilityError: a forced outcome cannot occur.
    """
    return _run("transfer", input_state, spec, policy, seed, alice_outcomes, bus_outcome)


def run_teleport(
    input_state: StateVector,
    spec: InteractionSpec,
    policy: str = "sample",
    seed: int | None = None,
    alice_outcomes: tuple[int, ...] | list[int] | None = None,
    bus_outcome: int | None = None,
) -> ProtocolTrace | list[ProtocolTrace]:
    """Teleport ``input_state`` onto Bob's pre-coupled blanks; same policies,
    arguments, and trace layout as :func:`run_transfer`."""
    return _run("teleport", input_state, spec, policy, seed, alice_outcomes, bus_outcome)


def repeat_until_entangled(
    spec: InteractionSpec,
    seed: int | None = None,
    trials: int = 1,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    input_state: StateVector | None = None,
) -> RepeatStats:
    """Repeat sampled transfers, feeding the corrected state back in, until a
    branch lands on an entangling target.

    Requires a spec whose mapping has at least one entangling outcome; local
    branches leave the (corrected) state intact, so retrying is free.

    Args:
        spec: interaction spec with kind ``combined`` or ``entangling``.
        seed: seed for the single generator driving all trials.
        trials: independent repetitions.
        max_rounds: per-trial cap; hitting it counts as failure.
        input_state: fixed input; fresh random states per trial when None.

    Raises:
        ValueError: the spec's mapping is purely local.
    """
    mapping = classify_mapping(spec)
    if mapping.kind == "local":
        raise ValueError("mapping has no entangling outcome; repetition cannot succeed")
    if trials < 1 or max_rounds < 1:
        raise ValueError("trials and max_rounds must be positive")
    rng = np.random.default_rng(seed)
    matrix = premeasurement_matrix(spec, "transfer")
    rounds_per_trial: list[int] = []
    successes = 0
    min_fidelity = 1.0
    for _ in range(trials):
        state = input_state if input_state is not None else random_state((spec.d,) * spec.m, rng)
        rounds = 0
        while rounds < max_rounds:
            rounds += 1
            trace, corrected = _branch_transfer(state, spec, matrix, (None, None), rng)
            min_fidelity = min(min_fidelity, trace.fidelity)
            if trace.target_gate != "identity":
                successes += 1
                break
            state = corrected
        rounds_per_trial.append(rounds)
    return RepeatStats(
        rounds_per_trial=tuple(rounds_per_trial),
        successes=successes,
        mean_rounds=sum(rounds_per_trial) / len(rounds_per_trial),
        min_fidelity=min_fidelity,
    )
