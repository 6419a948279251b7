"""Dense state-vector simulation for qudit registers with a shared bus.

States are flat complex vectors over a tensor product of subsystems; the
composite index is row-major, so the first subsystem is the most significant
digit and the bus is conventionally the last factor.  All sampling consumes an
explicit ``numpy.random.Generator``; nothing reads global RNG state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perms import OperatorSet, Permutation

__all__ = [
    "DEFAULT_DIMENSION_CAP",
    "MeasurementRecord",
    "StateVector",
    "ZeroProbabilityError",
    "apply_conditional",
    "apply_label_permutation",
    "apply_local",
    "basis_state",
    "fidelity",
    "make_state",
    "measure",
    "random_state",
    "reduced_purity",
    "tensor",
    "uniform_state",
]

DEFAULT_DIMENSION_CAP = 1 << 20
NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-10
PROBABILITY_FLOOR = 1e-12


class ZeroProbabilityError(ValueError):
    """Raised when a forced measurement outcome has zero Born probability."""


@dataclass(frozen=True, slots=True, eq=False)
class StateVector:
    """Normalized pure state over ``dims`` subsystems.

    ``amplitudes`` is a flat C-ordered complex128 vector of length
    ``prod(dims)``; treat it as immutable.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims)) if self.dims else 1

    def __repr__(self) -> str:
        return f"StateVector(dims={self.dims})"


@dataclass(frozen=True, slots=True)
class MeasurementRecord:
    """One projective measurement: which subsystem, in which basis, what came
    out, and with what Born probability."""

    subsystem: int
    basis: str
    outcome: int
    probability: float


def make_state(
    dims: tuple[int, ...] | list[int],
    amplitudes: np.ndarray | list[complex],
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> StateVector:
    """Build a normalized state, rejecting malformed input.

    Args:
        dims: subsystem dimensions, bus last by convention.
        amplitudes: complex vector of length ``prod(dims)``; normalized here.
        dimension_cap: refuse total dimensions beyond this bound.

    Raises:
        ValueError: on nonpositive dims, cap excess, wrong length, or a
            zero vector (not normalizable).
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"dims must be positive, got {dims}")
    total = math.prod(dims)
    if total > dimension_cap:
        raise ValueError(f"total dimension {total} exceeds cap {dimension_cap}")
    vec = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if vec.shape != (total,):
        raise ValueError(f"expected {total} amplitudes, got {vec.shape[0]}")
    norm = float(np.linalg.norm(vec))
    if norm < NORM_ATOL:
        raise ValueError("zero vector is not normalizable")
    return StateVector(dims, vec / norm)


def basis_state(dims: tuple[int, ...] | list[int], label: int) -> StateVector:
    """Computational basis state with composite index ``label``."""
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    if not 0 <= label < total:
        raise ValueError(f"label {label} outside range(0, {total})")
    vec = np.zeros(total, dtype=np.complex128)
    vec[label] = 1.0
    return StateVector(dims, vec)


def uniform_state(dims: tuple[int, ...] | list[int]) -> StateVector:
    """Uniform superposition with all-positive real amplitudes."""
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    return StateVector(dims, np.full(total, 1.0 / math.sqrt(total), dtype=np.complex128))


def random_state(dims: tuple[int, ...] | list[int], rng: np.random.Generator) -> StateVector:
    """Haar-like random pure state from complex Gaussian amplitudes."""
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    vec = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return make_state(dims, vec)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product ``a (x) b``; ``a``'s subsystems become the leading ones."""
    return StateVector(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))


def _axis_split(dims: tuple[int, ...], subsystem: int) -> tuple[int, int, int]:
    if not 0 <= subsystem < len(dims):
        raise ValueError(f"subsystem {subsystem} outside range(0, {len(dims)})")
    before = math.prod(dims[:subsystem]) if subsystem else 1
    after = math.prod(dims[subsystem + 1 :]) if subsystem + 1 < len(dims) else 1
    return before, dims[subsystem], after


def apply_conditional(state: StateVector, control: int, operator_set: OperatorSet) -> StateVector:
    """Apply a conditional bus coupling: member ``k`` of ``operator_set``
    permutes the bus labels on the branch where subsystem ``control`` is in
    level ``k``.  The bus must be the last subsystem.

    Raises:
        ValueError: if the control is the bus itself or dimensions disagree.
    """
    dims = state.dims
    if len(dims) < 2:
        raise ValueError("need at least a control subsystem and the bus")
    if control == len(dims) - 1:
        raise ValueError("the bus (last subsystem) cannot control itself")
    before, d_ctrl, after = _axis_split(dims, control)
    bus = dims[-1]
    if operator_set.subsystem_dim != d_ctrl:
        raise ValueError(
            f"operator set conditions a dim-{operator_set.subsystem_dim} qudit, control has {d_ctrl}"
        )
    if operator_set.bus_dim != bus:
        raise ValueError(f"operator set acts on {operator_set.bus_dim} labels, bus has {bus}")
    work = state.amplitudes.reshape(before, d_ctrl, after // bus, bus).copy()
    for level, member in enumerate(operator_set.members):
        targets = np.asarray(member.mapping, dtype=np.intp)
        block = work[:, level, :, :]
        rearranged = np.empty_like(block)
        rearranged[:, :, targets] = block
        work[:, level, :, :] = rearranged
    return StateVector(dims, work.reshape(-1))


def apply_local(
    state: StateVector,
    subsystem: int,
    op: Permutation | np.ndarray | tuple[str, int],
) -> StateVector:
    """Apply a single-subsystem operation.

    Args:
        state: input state.
        subsystem: target index.
        op: a :class:`Permutation` on the subsystem's labels, an explicit
            unitary matrix, or a generalized-Pauli descriptor ``("x", k)``
            (cyclic label shift by ``k``) / ``("z", k)`` (phase
            ``omega**(k*s)`` on level ``s``).

    Raises:
        ValueError: on shape mismatch or a non-unitary explicit matrix.
    """
    before, d, after = _axis_split(state.dims, subsystem)
    work = state.amplitudes.reshape(before, d, after)
    if isinstance(op, Permutation):
        if op.size != d:
            raise ValueError(f"permutation acts on {op.size} labels, subsystem has {d}")
        matrix = np.zeros((d, d), dtype=np.complex128)
        for s, image in enumerate(op.mapping):
            matrix[image, s] = 1.0
    elif isinstance(op, tuple):
        kind, power = op
        if kind == "x":
            shifted = Permutation(tuple((s + power) % d for s in range(d)))
            return apply_local(state, subsystem, shifted)
        if kind == "z":
            omega = np.exp(2j * np.pi / d)
            phases = omega ** (power * np.arange(d))
            out = work * phases[None, :, None]
            return StateVector(state.dims, out.reshape(-1))
        raise ValueError(f"unknown operation kind {kind!r}")
    else:
        matrix = np.asarray(op, dtype=np.complex128)
        if matrix.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {matrix.shape}")
        if not np.allclose(matrix @ matrix.conj().T, np.eye(d), atol=UNITARY_ATOL):
            raise ValueError("matrix is not unitary")
    out = np.einsum("ij,ajb->aib", matrix, work)
    return StateVector(state.dims, out.reshape(-1))


def apply_label_permutation(state: StateVector, perm: Permutation) -> StateVector:
    """Relabel the whole composite register: amplitude of ``s`` moves to ``perm(s)``."""
    if perm.size != state.total_dim:
        raise ValueError(f"permutation acts on {perm.size} labels, state has {state.total_dim}")
    out = np.empty_like(state.amplitudes)
    out[np.asarray(perm.mapping, dtype=np.intp)] = state.amplitudes
    return StateVector(state.dims, out)


def measure(
    state: StateVector,
    subsystem: int,
    basis: str = "computational",
    forced_outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[StateVector, MeasurementRecord]:
    """Projectively measure one subsystem and remove it from the register.

    In the ``"conjugate"`` basis the projectors are onto
    ``|chi_a> = d**-0.5 * sum_s omega**(a*s) |s>``, so outcome ``a`` imprints
    the conjugate phases ``omega**(-a*s)`` on what the subsystem was
    correlated with.

    Args:
        state: input state; must keep at least one other subsystem.
        subsystem: index to measure (removed from ``dims`` afterwards).
        basis: ``"computational"`` or ``"conjugate"``.
        forced_outcome: post-select this outcome instead of sampling.
        rng: required when sampling.

    Returns:
        (collapsed renormalized state, measurement record).

    Raises:
        ZeroProbabilityError: forced outcome has Born probability below
            ``1e-12``.
        ValueError: unknown basis, missing rng, or measuring the last
            remaining subsystem.
    """
    dims = state.dims
    if len(dims) < 2:
        raise ValueError("cannot remove the last remaining subsystem")
    before, d, after = _axis_split(dims, subsystem)
    work = state.amplitudes.reshape(before, d, after)
    if basis == "computational":
        branches = np.moveaxis(work, 1, 0)
    elif basis == "conjugate":
        omega = np.exp(2j * np.pi / d)
        projector_rows = omega ** (-np.outer(np.arange(d), np.arange(d))) / math.sqrt(d)
        branches = np.einsum("os,asb->oab", projector_rows, work)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    probabilities = np.einsum("oab,oab->o", branches, branches.conj()).real
    if forced_outcome is not None:
        if not 0 <= forced_outcome < d:
            raise ValueError(f"outcome {forced_outcome} outside range(0, {d})")
        outcome = int(forced_outcome)
        if probabilities[outcome] < PROBABILITY_FLOOR:
            raise ZeroProbabilityError(
                f"outcome {outcome} has probability {probabilities[outcome]:.3e}"
            )
    else:
        if rng is None:
            raise ValueError("sampling a measurement requires an rng")
        outcome = int(
            min(np.searchsorted(np.cumsum(probabilities), rng.random(), side="right"), d - 1)
        )
    probability = float(probabilities[outcome])
    collapsed = branches[outcome] / math.sqrt(probability)
    remaining = dims[:subsystem] + dims[subsystem + 1 :]
    record = MeasurementRecord(subsystem, basis, outcome, probability)
    return StateVector(remaining, collapsed.reshape(-1)), record


def fidelity(a: StateVector, b: StateVector) -> float:
    """Pure-state fidelity ``|<a|b>|**2``; requires identical dims."""
    if a.dims != b.dims:
        raise ValueError(f"dims mismatch: {a.dims} != {b.dims}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def reduced_purity(state: StateVector, subsystem: int) -> float:
    """Purity ``Tr(rho**2)`` of one subsystem's reduced density matrix."""
    before, d, after = _axis_split(state.dims, subsystem)
    work = state.amplitudes.reshape(before, d, after)
    rho = np.einsum("asb,atb->st", work, work.conj())
    return float(np.einsum("st,ts->", rho, rho).real)
