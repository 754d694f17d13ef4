"""Pauli basis indexing, dense operators and Pauli-coefficient vectorization.

Conventions used throughout the package:

* Pauli strings are indexed lexicographically, ``k = sum_m 4**(n-m) * alpha_m``
  with ``alpha_m`` in ``{0, 1, 2, 3} <-> {I, X, Y, Z}`` and qubit 1 the most
  significant digit (and the leftmost Kronecker factor).
* An operator ``A`` is vectorized as ``r_k = Tr[P_k A]`` (no ``1/d``), so that
  ``A = (1/d) sum_k r_k P_k`` and a PTM acts as ``r -> gamma @ r``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 6

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9

PAULI_LABELS = "IXYZ"

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)

SINGLE_QUBIT_PAULIS = np.stack([I2, X, Y, Z])
SINGLE_QUBIT_PAULIS.setflags(write=False)

# _PAULI_T[k, a, b] = sigma_k[b, a], so that sum_ab _PAULI_T[k, a, b] * A[a, b] = Tr[sigma_k A]
_PAULI_T = np.ascontiguousarray(SINGLE_QUBIT_PAULIS.transpose(0, 2, 1)).reshape(4, 4)


def check_num_qubits(n: int, max_qubits: int = MAX_QUBITS) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"number of qubits must be a positive integer, got {n!r}")
    if n > max_qubits:
        raise ValueError(
            f"n = {n} exceeds the dense-simulation limit of {max_qubits} qubits "
            f"(a PTM would be {4**n}x{4**n})"
        )
    return int(n)


def num_qubits_for_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def pauli_digits(k: int, n: int) -> tuple[int, ...]:
    """Base-4 digits of ``k`` on ``n`` qubits, qubit 1 first."""
    if not 0 <= k < 4**n:
        raise ValueError(f"Pauli index {k} out of range for n = {n}")
    digits = []
    for _ in range(n):
        k, a = divmod(k, 4)
        digits.append(a)
    return tuple(reversed(digits))


def pauli_index(digits) -> int:
    k = 0
    for a in digits:
        if a not in (0, 1, 2, 3):
            raise ValueError(f"Pauli digit must be in 0..3, got {a!r}")
        k = 4 * k + a
    return k


@dataclass(frozen=True)
class PauliString:
    """One element of the n-qubit Pauli basis, addressed by its lexicographic index."""

    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"number of qubits must be a positive integer, got {self.n!r}")
        if not 0 <= self.k < 4**self.n:
            raise ValueError(f"Pauli index {self.k} out of range for n = {self.n}")

    @classmethod
    def from_digits(cls, digits) -> PauliString:
        digits = tuple(digits)
        return cls(len(digits), pauli_index(digits))

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        try:
            return cls.from_digits(PAULI_LABELS.index(c) for c in label.upper())
        except ValueError:
            raise ValueError(f"invalid Pauli label {label!r}") from None

    @property
    def digits(self) -> tuple[int, ...]:
        return pauli_digits(self.k, self.n)

    @property
    def label(self) -> str:
        return "".join(PAULI_LABELS[a] for a in self.digits)

    @property
    def is_identity(self) -> bool:
        return self.k == 0

    def matrix(self) -> np.ndarray:
        return pauli_matrix(self)

    def to_json(self) -> dict:
        return {"label": self.label, "index": self.k}

    def __str__(self):
        return self.label


def _as_pauli(p, n: int | None) -> PauliString:
    if isinstance(p, PauliString):
        if n is not None and n != p.n:
            raise ValueError(f"Pauli string acts on {p.n} qubits, expected {n}")
        return p
    if isinstance(p, str):
        return PauliString.from_label(p)
    if n is None:
        raise ValueError("an integer Pauli index needs the number of qubits")
    return PauliString(n, int(p))


def pauli_matrix(p: PauliString | int | str, n: int | None = None) -> np.ndarray:
    """Dense ``sigma_{a_1} (x) ... (x) sigma_{a_n}`` for a Pauli string or index."""
    p = _as_pauli(p, n)
    check_num_qubits(p.n)
    out = np.ones((1, 1), dtype=complex)
    for a in p.digits:
        out = np.kron(out, SINGLE_QUBIT_PAULIS[a])
    return out


@lru_cache(maxsize=4)
def pauli_basis(n: int) -> np.ndarray:
    """All ``4**n`` Pauli matrices stacked as a read-only ``(d*d, d, d)`` array.

    Memory grows as ``16**n * 16`` bytes; meant for n <= 4.
    """
    check_num_qubits(n, max_qubits=4)
    basis = SINGLE_QUBIT_PAULIS
    for _ in range(n - 1):
        basis = np.einsum("kab,lcd->klacbd", basis, SINGLE_QUBIT_PAULIS)
        dim = basis.shape[2] * 2
        basis = basis.reshape(-1, dim, dim)
    basis = np.ascontiguousarray(basis)
    basis.setflags(write=False)
    return basis


def z_basis_rotation(p: PauliString | int | str, n: int | None = None) -> np.ndarray:
    """Unitary ``U`` with ``<P> = Tr[Z_P U rho U^dag]``.

    ``Z_P`` carries a ``Z`` on every qubit where ``P`` is not the identity, so
    the Pauli expectation becomes a parity count of computational-basis
    outcomes. Per qubit: ``X = H Z H`` and ``Y = S H Z H S^dag``.
    """
    p = _as_pauli(p, n)
    per_qubit = {0: I2, 1: H, 2: H @ S.conj().T, 3: I2}
    out = np.ones((1, 1), dtype=complex)
    for a in p.digits:
        out = np.kron(out, per_qubit[a])
    return out


def z_string(p: PauliString | int | str, n: int | None = None) -> np.ndarray:
    """The diagonal Z-parity observable paired with :func:`z_basis_rotation`."""
    p = _as_pauli(p, n)
    return pauli_matrix(PauliString.from_digits(3 if a else 0 for a in p.digits))


# -- Pauli coefficient transforms -------------------------------------------------
#
# Both transforms act on the leading axis of ``x``, which must hold row-major
# vectorized d x d operators (length d*d). They run qubit by qubit, so the cost
# is O(n * 4**n) per column instead of O(16**n).


def to_pauli_coefficients(x: np.ndarray, n: int) -> np.ndarray:
    """Map row-major ``vec(A)`` to ``(Tr[P_k A])_k`` along axis 0."""
    x = np.asarray(x)
    rest = x.shape[1:]
    t = x.reshape((2,) * (2 * n) + rest)
    # interleave (row_m, col_m) per qubit so each qubit owns one axis of size 4
    order = [ax for m in range(n) for ax in (m, n + m)]
    order += list(range(2 * n, t.ndim))
    t = t.transpose(order).reshape((4,) * n + rest)
    for m in range(n):
        t = np.tensordot(_PAULI_T, t, axes=([1], [m]))
        t = np.moveaxis(t, 0, m)
    return t.reshape((4**n,) + rest)


def from_pauli_coefficients(r: np.ndarray, n: int) -> np.ndarray:
    """Map coefficients to row-major ``vec(sum_k r_k P_k)`` along axis 0."""
    r = np.asarray(r)
    rest = r.shape[1:]
    t = r.reshape((4,) * n + rest).astype(complex, copy=False)
    # vec(P_k)[(a, b)] = sigma_k[a, b]
    basis = SINGLE_QUBIT_PAULIS.reshape(4, 4).T
    for m in range(n):
        t = np.tensordot(basis, t, axes=([1], [m]))
        t = np.moveaxis(t, 0, m)
    t = t.reshape((2,) * (2 * n) + rest)
    inverse = [2 * m for m in range(n)] + [2 * m + 1 for m in range(n)]
    inverse += list(range(2 * n, t.ndim))
    t = t.transpose(inverse)
    return t.reshape((4**n,) + rest)


# -- states -------------------------------------------------------------------------


def validate_density_matrix(rho, n: int | None = None) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a valid n-qubit state.

    Raises ``ValueError`` unless ``rho`` is square with a power-of-two size,
    Hermitian and unit-trace within ``HERMITIAN_TOL`` and has no eigenvalue
    below ``-PSD_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    m = num_qubits_for_dim(rho.shape[0])
    if n is not None and m != n:
        raise ValueError(f"state acts on {m} qubits, expected {n}")
    check_num_qubits(m)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > HERMITIAN_TOL:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def pure_state(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).ravel()
    ket = ket / np.linalg.norm(ket)
    return np.outer(ket, ket.conj())


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho, rho)))


def pauli_expectation(p: PauliString | int | str, rho) -> float:
    """``Tr[P rho]`` for a valid density matrix ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits_for_dim(rho.shape[0])
    p = _as_pauli(p, n)
    if p.n != n:
        raise ValueError(f"Pauli string acts on {p.n} qubits but the state on {n}")
    # Tr[P rho] = sum_ab P[b, a] rho[a, b]
    value = np.sum(pauli_matrix(p).T * rho)
    if abs(value.imag) > HERMITIAN_TOL:
        raise ValueError(
            f"expectation value has imaginary part {value.imag:.3g}; state is not Hermitian"
        )
    return float(value.real)


def vectorize(rho) -> np.ndarray:
    """Pauli vector ``r_k = Tr[P_k rho]`` of a Hermitian operator."""
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits_for_dim(rho.shape[0])
    check_num_qubits(n)
    r = to_pauli_coefficients(rho.reshape(-1), n)
    if np.max(np.abs(r.imag)) > HERMITIAN_TOL:
        raise ValueError("operator is not Hermitian; its Pauli coefficients are complex")
    return r.real.copy()


def devectorize(r) -> np.ndarray:
    """Inverse of :func:`vectorize` for unit-trace states: ``(1/d) sum_k r_k P_k``."""
    r = np.asarray(r, dtype=float)
    n = num_qubits_for_dim(r.shape[0]) // 2 if r.ndim == 1 else -1
    if r.ndim != 1 or 4**n != r.shape[0]:
        raise ValueError(f"Pauli vector must have length 4**n, got shape {r.shape}")
    check_num_qubits(n)
    if abs(r[0] - 1) > HERMITIAN_TOL:
        raise ValueError(f"Pauli vector has r_0 = {r[0]:.12g}; a unit-trace state needs r_0 = 1")
    d = 2**n
    return from_pauli_coefficients(r, n).reshape(d, d) / d
