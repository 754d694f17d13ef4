"""Input-state families, their reconstruction matrices, and preparation channels."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .channels import (
    ChannelError,
    KrausChannel,
    PauliTransferMatrix,
    ptm_to_choi,
)
from .pauli import (
    PSD_TOL,
    I2,
    H,
    S,
    X,
    Z,
    check_num_qubits,
    pauli_digits,
    pauli_matrix,
    purity,
    validate_density_matrix,
    vectorize,
)

BETA_TOL = 1e-10
PURITY_TOL = 1e-9


class Protocol(str, enum.Enum):
    DPTM = "dptm"
    SQPT = "sqpt"

    def __str__(self):
        return self.value


KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_PLUS_I = np.array([1, 1j], dtype=complex) / np.sqrt(2)

# Order matters: it fixes the sQPT reconstruction matrix and its inverse.
SQPT_SINGLE_QUBIT_KETS = (KET_1, KET_PLUS, KET_PLUS_I, KET_0)

SQPT_BETA_INV_1Q = 0.5 * np.array(
    [
        [1, -1, -1, -1],
        [0, 2, 0, 0],
        [0, 0, 2, 0],
        [1, -1, -1, 1],
    ],
    dtype=float,
)
SQPT_BETA_INV_1Q.setflags(write=False)


def _check_index(j: int, n: int) -> None:
    if not 0 <= j < 4**n:
        raise ValueError(f"state index {j} out of range for n = {n}")


def dptm_state(j: int, n: int) -> np.ndarray:
    """``1/d`` for ``j = 0`` and ``(1 + P_j)/d`` otherwise."""
    n = check_num_qubits(n)
    _check_index(j, n)
    d = 2**n
    rho = np.eye(d, dtype=complex) / d
    if j:
        rho = rho + pauli_matrix(j, n) / d
    return rho


def sqpt_state(j: int, n: int) -> np.ndarray:
    """Kronecker product of ``|1>, |+>, |+i>, |0>`` picked by the base-4 digits of ``j``."""
    n = check_num_qubits(n)
    _check_index(j, n)
    ket = np.ones(1, dtype=complex)
    for a in pauli_digits(j, n):
        ket = np.kron(ket, SQPT_SINGLE_QUBIT_KETS[a])
    return np.outer(ket, ket.conj())


_STATE_BUILDERS = {Protocol.DPTM: dptm_state, Protocol.SQPT: sqpt_state}


def input_state(protocol: Protocol | str, j: int, n: int) -> np.ndarray:
    return _STATE_BUILDERS[Protocol(protocol)](j, n)


def beta_of_states(states: Sequence[np.ndarray]) -> np.ndarray:
    """``beta_ij = Tr[P_i rho_j]``: column j is the Pauli vector of state j."""
    return np.stack([vectorize(rho) for rho in states], axis=1)


@dataclass(frozen=True, eq=False)
class ReconstructionMatrix:
    beta: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        residual = np.max(np.abs(self.beta @ self.inverse - np.eye(len(self.beta))))
        if residual > BETA_TOL:
            raise ValueError(f"beta @ beta_inv deviates from identity by {residual:.3g}")
        self.beta.setflags(write=False)
        self.inverse.setflags(write=False)

    @classmethod
    def from_beta(cls, beta: np.ndarray) -> ReconstructionMatrix:
        beta = np.array(beta, dtype=float)
        cond = np.linalg.cond(beta)
        if not np.isfinite(cond) or cond > 1e12:
            raise ValueError(
                f"reconstruction matrix is singular (condition number {cond:.3g}); "
                "the states do not form a basis"
            )
        return cls(beta, np.linalg.inv(beta))


@dataclass(frozen=True, eq=False)
class StateFamily:
    """A complete, linearly independent set of ``d^2`` input states."""

    protocol: Protocol
    n: int
    states: np.ndarray = field(repr=False)
    matrices: ReconstructionMatrix = field(init=False, repr=False)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        d = 2**self.n
        if states.shape != (d * d, d, d):
            raise ValueError(f"a {self.n}-qubit family needs {d * d} states of size {d}x{d}")
        for rho in states:
            validate_density_matrix(rho, self.n)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrices", ReconstructionMatrix.from_beta(beta_of_states(states)))

    def __len__(self):
        return len(self.states)

    def __getitem__(self, j):
        return self.states[j]

    @property
    def beta(self) -> np.ndarray:
        return self.matrices.beta

    @property
    def beta_inv(self) -> np.ndarray:
        return self.matrices.inverse


@lru_cache(maxsize=16)
def state_family(protocol: Protocol | str, n: int) -> StateFamily:
    protocol = Protocol(protocol)
    n = check_num_qubits(n, max_qubits=4)
    states = [input_state(protocol, j, n) for j in range(4**n)]
    return StateFamily(protocol, n, np.stack(states))


def beta_matrix(family: StateFamily) -> ReconstructionMatrix:
    return family.matrices


def dptm_beta_inverse(n: int) -> np.ndarray:
    """Closed form ``delta_ij - (1 - delta_0j) delta_i0``: identity with -1 across row 0."""
    d2 = 4 ** check_num_qubits(n)
    inv = np.eye(d2)
    inv[0, 1:] = -1.0
    return inv


def sqpt_beta_inverse(n: int) -> np.ndarray:
    """``(beta_Q^-1)^{(x) n}`` built explicitly."""
    out = np.ones((1, 1))
    for _ in range(check_num_qubits(n)):
        out = np.kron(out, SQPT_BETA_INV_1Q)
    return out


def sqpt_column(j: int, n: int) -> dict[int, float]:
    """Nonzero entries ``{k: c_k}`` of column ``j`` of ``(beta_Q^-1)^{(x) n}``.

    Built digit by digit, so it works beyond the dense-simulation limit.
    """
    column = {0: 1.0}
    for a in pauli_digits(j, n):
        single = {r: float(SQPT_BETA_INV_1Q[r, a]) for r in range(4) if SQPT_BETA_INV_1Q[r, a]}
        column = {4 * k + r: c * cr for k, c in column.items() for r, cr in single.items()}
    return dict(sorted(column.items()))


# -- preparation channels ----------------------------------------------------------


@dataclass(frozen=True)
class PrepChannelSolution:
    """PTM of the map sending each seed to its target, plus a CP diagnosis.

    The solve only enforces the linear constraints; ``is_cp`` reports whether
    the resulting map is physically implementable.
    """

    ptm: PauliTransferMatrix
    min_choi_eigenvalue: float
    max_residual: float

    @property
    def is_cp(self) -> bool:
        return self.min_choi_eigenvalue >= -PSD_TOL


def prep_channel_solve(targets, seeds) -> PrepChannelSolution:
    """Solve ``Lambda = pi B^-1`` with ``pi_ij = Tr[P_i rho_j]`` and ``B_ij = Tr[P_i psi_j]``."""
    targets = targets.states if isinstance(targets, StateFamily) else np.asarray(targets)
    seeds = seeds.states if isinstance(seeds, StateFamily) else np.asarray(seeds)
    if len(targets) != len(seeds):
        raise ValueError(f"got {len(targets)} targets but {len(seeds)} seeds")
    for psi in seeds:
        validate_density_matrix(psi)
        if purity(psi) < 1 - PURITY_TOL:
            raise ValueError(f"seed states must be pure, got purity {purity(psi):.6g}")
    for rho in targets:
        validate_density_matrix(rho)
    pi = beta_of_states(targets)
    b = beta_of_states(seeds)
    if pi.shape[0] != len(seeds):
        raise ValueError(f"need {pi.shape[0]} seed/target pairs, got {len(seeds)}")
    b_inv = ReconstructionMatrix.from_beta(b).inverse
    lam = pi @ b_inv
    ptm = PauliTransferMatrix(lam, spec={"model": "prep_solve"}, check=False)
    residual = float(np.max(np.abs(lam @ b - pi)))
    try:
        min_eig = ptm_to_choi(ptm).min_eigenvalue
    except ChannelError:
        min_eig = -np.inf
    return PrepChannelSolution(ptm, min_eig, residual)


CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)


def _e2_unitaries() -> tuple[np.ndarray, np.ndarray]:
    u = CNOT @ np.kron(S, I2) @ np.kron(H, I2)
    v = np.kron(I2, Z) @ np.kron(I2, X)
    return u, v


def prep_channel_builtin(name: str) -> KrausChannel:
    """Preparation channels for the mixed DPTM inputs.

    * ``E0``: ``psi/2 + X psi X/2`` on one qubit (``|0> -> 1/2``).
    * ``E1``: ``E0`` on qubit 2 of a pair (``|+0> -> rho_4``).
    * ``E2``: ``U psi U^dag/2 + VU psi U^dag V^dag/2`` with
      ``U = CNOT (S (x) 1)(H (x) 1)``, ``V = (1 (x) Z)(1 (x) X)`` (``|00> -> rho_6``).
    """
    r = np.sqrt(0.5)
    if name == "E0":
        ops = [r * I2, r * X]
    elif name == "E1":
        ops = [r * np.kron(I2, I2), r * np.kron(I2, X)]
    elif name == "E2":
        u, v = _e2_unitaries()
        ops = [r * u, r * v @ u]
    else:
        raise ValueError(f"unknown preparation channel {name!r}; choose from E0, E1, E2")
    return KrausChannel(ops, spec={"model": "prep", "params": {"name": name}})


# seed state and the DPTM target index (n, j) each built-in channel produces
BUILTIN_PREP_TARGETS = {
    "E0": (np.outer(KET_0, KET_0.conj()), 1, 0),
    "E1": (np.outer(np.kron(KET_PLUS, KET_0), np.kron(KET_PLUS, KET_0).conj()), 2, 4),
    "E2": (np.outer(np.kron(KET_0, KET_0), np.kron(KET_0, KET_0).conj()), 2, 6),
}


def ancilla_reduced_state() -> np.ndarray:
    """Single-qubit ``1/2`` as the marginal of ``(|00> + |11>)/sqrt(2)``."""
    bell = (np.kron(KET_0, KET_0) + np.kron(KET_1, KET_1)) / np.sqrt(2)
    full = np.outer(bell, bell.conj()).reshape(2, 2, 2, 2)
    return np.einsum("iaja->ij", full)

