"""Channel representations (Kraus, PTM, Choi), conversions and the model zoo.

Superoperators use row-major vectorization, ``vec(A rho B) = (A (x) B^T) vec(rho)``.
The Choi matrix is ``C = (Phi (x) Id)(|Omega><Omega|)`` with
``|Omega> = sum_k |kk> / sqrt(d)``, so ``C >= 0`` iff the map is completely
positive, and the partial trace over the first (output) factor is ``1/d``
iff the map is trace preserving.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .pauli import (
    HERMITIAN_TOL,
    PSD_TOL,
    SINGLE_QUBIT_PAULIS,
    I2,
    X,
    Z,
    check_num_qubits,
    devectorize,
    from_pauli_coefficients,
    num_qubits_for_dim,
    to_pauli_coefficients,
    validate_density_matrix,
    vectorize,
)

TP_TOL = 1e-9


class ChannelError(ValueError):
    """Raised when an operator set or matrix does not describe a valid channel."""


class TracePreservationWarning(UserWarning):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


class KrausChannel:
    """A channel ``rho -> sum_i A_i rho A_i^dag`` given by its Kraus operators.

    Trace preservation is checked on construction; pass ``check_tp=False``
    to build a non-TP operator set for diagnostics.
    """

    def __init__(self, operators, spec: dict | None = None, *, check_tp: bool = True):
        try:
            ops = np.asarray(operators, dtype=complex)
        except ValueError:
            raise ChannelError("Kraus operators must all have the same shape") from None
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ChannelError(f"Kraus operators must be square matrices, got shape {ops.shape}")
        self.n = check_num_qubits(num_qubits_for_dim(ops.shape[1]))
        if not 1 <= ops.shape[0] <= self.dim**2:
            raise ChannelError(
                f"expected between 1 and {self.dim**2} Kraus operators, got {ops.shape[0]}"
            )
        self.operators = _readonly(ops)
        self.spec = spec
        self.tp_residual = float(
            np.linalg.norm(np.einsum("kba,kbc->ac", ops.conj(), ops) - np.eye(self.dim))
        )
        if check_tp and self.tp_residual > TP_TOL:
            raise ChannelError(
                f"Kraus operators are not trace preserving (residual {self.tp_residual:.3g})"
            )

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def is_trace_preserving(self) -> bool:
        return self.tp_residual <= TP_TOL

    def __len__(self):
        return len(self.operators)

    def __call__(self, rho) -> np.ndarray:
        return kraus_apply(self, rho)

    def __repr__(self):
        name = self.spec.get("model", "kraus") if self.spec else "kraus"
        return f"KrausChannel({name}, n={self.n}, rank<={len(self)})"


class PauliTransferMatrix:
    """Real ``d^2 x d^2`` matrix ``gamma_ij = Tr[P_i Phi(P_j)] / d``."""

    def __init__(self, gamma, spec: dict | None = None, *, check: bool = True):
        gamma = np.asarray(gamma)
        if np.iscomplexobj(gamma):
            if np.max(np.abs(gamma.imag), initial=0.0) > HERMITIAN_TOL:
                raise ChannelError("PTM entries must be real")
            gamma = gamma.real
        gamma = gamma.astype(float)
        if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
            raise ChannelError(f"PTM must be square, got shape {gamma.shape}")
        n = num_qubits_for_dim(gamma.shape[0]) // 2
        if 4**n != gamma.shape[0]:
            raise ChannelError(f"PTM size must be 4**n, got {gamma.shape[0]}")
        self.n = check_num_qubits(n)
        self.gamma = _readonly(gamma)
        self.spec = spec
        if check:
            e0 = np.zeros(gamma.shape[0])
            e0[0] = 1.0
            if np.max(np.abs(gamma[0] - e0)) > TP_TOL:
                raise ChannelError("PTM row 0 must be (1, 0, ..., 0) for a trace-preserving map")
            if np.max(np.abs(gamma)) > 1 + TP_TOL:
                raise ChannelError("PTM entries of a CPTP map lie in [-1, 1]")

    @property
    def dim(self) -> int:
        return 2**self.n

    def __getitem__(self, idx):
        return self.gamma[idx]

    def __matmul__(self, other: PauliTransferMatrix) -> PauliTransferMatrix:
        return compose_ptm(self, other)

    def __repr__(self):
        return f"PauliTransferMatrix(n={self.n})"


class ChoiMatrix:
    """Choi matrix ``(Phi (x) Id)(|Omega><Omega|)`` of a map on n qubits."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ChannelError(f"Choi matrix must be square, got shape {entries.shape}")
        n = num_qubits_for_dim(entries.shape[0]) // 2
        if 4**n != entries.shape[0]:
            raise ChannelError(f"Choi matrix size must be 4**n, got {entries.shape[0]}")
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOL:
            raise ChannelError("Choi matrix is not Hermitian (map is not Hermiticity preserving)")
        self.n = check_num_qubits(n)
        self.entries = _readonly(entries)

    @property
    def dim(self) -> int:
        return 2**self.n

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    @property
    def is_cp(self) -> bool:
        return self.min_eigenvalue >= -PSD_TOL

    def partial_trace_output(self) -> np.ndarray:
        d = self.dim
        return np.einsum("iaib->ab", self.entries.reshape(d, d, d, d))

    def partial_trace_input(self) -> np.ndarray:
        d = self.dim
        return np.einsum("aibi->ab", self.entries.reshape(d, d, d, d))

    def __repr__(self):
        return f"ChoiMatrix(n={self.n})"


# -- application ------------------------------------------------------------------


def kraus_apply(ch: KrausChannel, rho, *, strict: bool = True) -> np.ndarray:
    """``sum_i A_i rho A_i^dag``.

    A non-trace-preserving ``ch`` raises ``ChannelError`` when ``strict``,
    and only warns otherwise.
    """
    if not ch.is_trace_preserving:
        msg = f"channel is not trace preserving (residual {ch.tp_residual:.3g})"
        if strict:
            raise ChannelError(msg)
        warnings.warn(msg, TracePreservationWarning, stacklevel=2)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise ValueError(f"state of shape {rho.shape} does not match a {ch.n}-qubit channel")
    ops = ch.operators
    return np.einsum("kab,bc,kdc->ad", ops, rho, ops.conj())


def ptm_apply(ptm: PauliTransferMatrix, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ptm.dim, ptm.dim):
        raise ValueError(f"state of shape {rho.shape} does not match a {ptm.n}-qubit PTM")
    return devectorize(ptm.gamma @ vectorize(rho))


def compose_ptm(g2: PauliTransferMatrix, g1: PauliTransferMatrix) -> PauliTransferMatrix:
    """PTM of ``Phi_2 o Phi_1`` (apply ``g1`` first)."""
    if g1.n != g2.n:
        raise ValueError(f"cannot compose a {g2.n}-qubit PTM with a {g1.n}-qubit PTM")
    return PauliTransferMatrix(g2.gamma @ g1.gamma, check=False)


def compose_kraus(ch2: KrausChannel, ch1: KrausChannel) -> KrausChannel:
    """Kraus set of ``Phi_2 o Phi_1``; may exceed d^2 operators, so rank-reduce via Choi."""
    if ch1.n != ch2.n:
        raise ValueError(f"cannot compose a {ch2.n}-qubit channel with a {ch1.n}-qubit channel")
    ops = np.einsum("aij,bjk->abik", ch2.operators, ch1.operators).reshape(-1, ch1.dim, ch1.dim)
    if len(ops) <= ch1.dim**2:
        return KrausChannel(ops)
    return choi_to_kraus(kraus_to_choi(ops))


# -- conversions --------------------------------------------------------------------


def kraus_to_superop(ch: KrausChannel | Sequence[np.ndarray]) -> np.ndarray:
    ops = ch.operators if isinstance(ch, KrausChannel) else np.asarray(ch, dtype=complex)
    d = ops.shape[1]
    return np.einsum("kac,kbd->abcd", ops, ops.conj()).reshape(d * d, d * d)


def superop_to_ptm(superop: np.ndarray, *, check: bool = True) -> PauliTransferMatrix:
    superop = np.asarray(superop, dtype=complex)
    n = num_qubits_for_dim(superop.shape[0]) // 2
    d = 2**n
    # gamma = U^dag S U / d with U the matrix of vec(P_j) columns
    left = to_pauli_coefficients(superop, n)
    gamma = to_pauli_coefficients(left.conj().T, n).conj().T / d
    if np.max(np.abs(gamma.imag)) > HERMITIAN_TOL:
        raise ChannelError("map is not Hermiticity preserving; its PTM is complex")
    return PauliTransferMatrix(gamma.real, check=check)


def ptm_to_superop(ptm: PauliTransferMatrix) -> np.ndarray:
    n, d = ptm.n, ptm.dim
    left = from_pauli_coefficients(ptm.gamma, n)
    return from_pauli_coefficients(left.conj().T, n).conj().T / d


def kraus_to_ptm(ch: KrausChannel) -> PauliTransferMatrix:
    """PTM of a Kraus channel; row 0 is checked for trace-preserving channels."""
    ptm = superop_to_ptm(kraus_to_superop(ch), check=ch.is_trace_preserving)
    ptm.spec = ch.spec
    return ptm


def superop_to_choi(superop: np.ndarray) -> ChoiMatrix:
    superop = np.asarray(superop)
    d = int(round(np.sqrt(superop.shape[0])))
    # C[(i,k),(j,l)] = S[(i,j),(k,l)] / d
    c = superop.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d) / d
    return ChoiMatrix(c)


def choi_to_superop(choi: ChoiMatrix) -> np.ndarray:
    d = choi.dim
    return choi.entries.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d) * d


def ptm_to_choi(ptm: PauliTransferMatrix) -> ChoiMatrix:
    return superop_to_choi(ptm_to_superop(ptm))


def choi_to_ptm(choi: ChoiMatrix, *, check: bool = True) -> PauliTransferMatrix:
    return superop_to_ptm(choi_to_superop(choi), check=check)


def kraus_to_choi(ch: KrausChannel | Sequence[np.ndarray]) -> ChoiMatrix:
    ops = ch.operators if isinstance(ch, KrausChannel) else np.asarray(ch, dtype=complex)
    d = ops.shape[1]
    vecs = ops.reshape(len(ops), d * d)
    return ChoiMatrix(vecs.T @ vecs.conj() / d)


def choi_to_kraus(choi: ChoiMatrix, spec: dict | None = None) -> KrausChannel:
    """Canonical Kraus operators from the Choi spectrum.

    Eigenvalues in ``(-PSD_TOL, PSD_TOL)`` are dropped; anything more negative
    means the map is not completely positive and raises ``ChannelError``.
    """
    d = choi.dim
    evals, evecs = np.linalg.eigh(choi.entries)
    if evals[0] < -PSD_TOL:
        raise ChannelError(
            f"Choi matrix has eigenvalue {evals[0]:.3g}; the map is not completely positive"
        )
    keep = evals > PSD_TOL
    ops = [np.sqrt(d * lam) * v.reshape(d, d) for lam, v in zip(evals[keep], evecs.T[keep])]
    return KrausChannel(ops[::-1], spec=spec, check_tp=False)


# -- diagnostics ----------------------------------------------------------------------


@dataclass(frozen=True)
class CPTPReport:
    tp_residual: float
    min_choi_eigenvalue: float
    unital_residual: float

    @property
    def is_tp(self) -> bool:
        return self.tp_residual <= TP_TOL

    @property
    def is_cp(self) -> bool:
        return self.min_choi_eigenvalue >= -PSD_TOL

    @property
    def is_cptp(self) -> bool:
        return self.is_tp and self.is_cp

    @property
    def is_unital(self) -> bool:
        return self.unital_residual <= TP_TOL

    def to_json(self) -> dict:
        return {
            "tp_residual": self.tp_residual,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "unital_residual": self.unital_residual,
            "is_tp": self.is_tp,
            "is_cp": self.is_cp,
            "is_unital": self.is_unital,
        }


def validate_cptp(obj) -> CPTPReport:
    """Trace-preservation residual, smallest Choi eigenvalue and unitality of a map.

    Accepts a :class:`KrausChannel`, a raw sequence of Kraus operators, a
    :class:`ChoiMatrix` or a :class:`PauliTransferMatrix`.
    """
    if isinstance(obj, PauliTransferMatrix):
        choi = ptm_to_choi(obj)
    elif isinstance(obj, ChoiMatrix):
        choi = obj
    else:
        if not isinstance(obj, KrausChannel):
            obj = KrausChannel(obj, check_tp=False)
        choi = kraus_to_choi(obj)
    d = choi.dim
    eye = np.eye(d)
    # d * Tr_out(C) = (sum A^dag A)^T and d * Tr_in(C) = Phi(1)
    tp = float(np.linalg.norm(d * choi.partial_trace_output() - eye))
    unital = float(np.linalg.norm(d * choi.partial_trace_input() - eye))
    return CPTPReport(tp, choi.min_eigenvalue, unital)


def is_pauli_channel(ptm: PauliTransferMatrix, tol: float = TP_TOL) -> bool:
    off = ptm.gamma - np.diag(np.diag(ptm.gamma))
    return bool(np.max(np.abs(off)) <= tol)


def is_unital(ptm: PauliTransferMatrix, tol: float = TP_TOL) -> bool:
    return bool(np.max(np.abs(ptm.gamma[1:, 0]), initial=0.0) <= tol)


# -- model zoo ----------------------------------------------------------------------


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ChannelError(f"{name} must lie in [0, 1], got {value}")
    return value


def _pauli_mixture(weights: np.ndarray, spec: dict) -> KrausChannel:
    """Kraus set ``sqrt(w_k) P_k`` over the Pauli basis, ``weights`` indexed by Pauli index."""
    n = num_qubits_for_dim(int(round(np.sqrt(len(weights)))))
    ops = []
    for k, w in enumerate(weights):
        digits = [(k >> (2 * (n - 1 - m))) & 3 for m in range(n)]
        op = np.ones((1, 1), dtype=complex)
        for a in digits:
            op = np.kron(op, SINGLE_QUBIT_PAULIS[a])
        ops.append(np.sqrt(w) * op)
    return KrausChannel(ops, spec=spec)


def identity(n: int = 1) -> KrausChannel:
    n = check_num_qubits(n)
    return KrausChannel(np.eye(2**n), spec={"model": "identity", "params": {"n": n}})


def amplitude_damping(p: float) -> KrausChannel:
    """Single-qubit decay ``|1> -> |0>`` with probability ``p``."""
    p = _check_probability("p", p)
    a0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return KrausChannel([a0, a1], spec={"model": "amplitude_damping", "params": {"p": p}})


def bit_flip(p: float) -> KrausChannel:
    p = _check_probability("p", p)
    return KrausChannel(
        [np.sqrt(1 - p) * I2, np.sqrt(p) * X], spec={"model": "bit_flip", "params": {"p": p}}
    )


def phase_flip(p: float) -> KrausChannel:
    p = _check_probability("p", p)
    return KrausChannel(
        [np.sqrt(1 - p) * I2, np.sqrt(p) * Z], spec={"model": "phase_flip", "params": {"p": p}}
    )


def depolarizing(p: float, n: int = 1) -> KrausChannel:
    """``rho -> (1 - p) rho + p 1/d``, whose PTM is ``diag(1, 1-p, ..., 1-p)``."""
    p = _check_probability("p", p)
    n = check_num_qubits(n)
    d2 = 4**n
    weights = np.full(d2, p / d2)
    weights[0] += 1 - p
    return _pauli_mixture(weights, {"model": "depolarizing", "params": {"p": p, "n": n}})


def correlated_pauli_weights(p_vec, mu: float) -> np.ndarray:
    """Two-qubit Markov-chain weights ``w[a1, a2] = p[a1] ((1 - mu) p[a2] + mu delta)``."""
    p_vec = np.asarray(p_vec, dtype=float)
    mu = _check_probability("mu", mu)
    if p_vec.shape != (4,):
        raise ChannelError(f"p_vec must have 4 entries, got shape {p_vec.shape}")
    if np.any(p_vec < -HERMITIAN_TOL) or np.any(p_vec > 1 + HERMITIAN_TOL):
        raise ChannelError(f"p_vec entries must lie in [0, 1], got {p_vec}")
    if abs(p_vec.sum() - 1) > HERMITIAN_TOL:
        raise ChannelError(f"p_vec must sum to 1, got {p_vec.sum():.12g}")
    p_vec = np.clip(p_vec, 0.0, 1.0)
    return p_vec[:, None] * ((1 - mu) * p_vec[None, :] + mu * np.eye(4))


def correlated_pauli(p_vec, mu: float) -> KrausChannel:
    """Two-qubit correlated Pauli channel with all 16 ``sigma_a1 (x) sigma_a2`` operators."""
    weights = correlated_pauli_weights(p_vec, mu)
    spec = {
        "model": "correlated_pauli",
        "params": {"p_vec": [float(v) for v in p_vec], "mu": float(mu)},
    }
    return _pauli_mixture(weights.ravel(), spec)


def correlated_depolarizing(p: float, mu: float) -> KrausChannel:
    p = _check_probability("p", p)
    ch = correlated_pauli([1 - 3 * p / 4, p / 4, p / 4, p / 4], mu)
    ch.spec = {"model": "correlated_depolarizing", "params": {"p": p, "mu": float(mu)}}
    return ch


def random_channel(n: int, num_kraus: int, seed) -> KrausChannel:
    """Channel from a Haar-random isometry ``d -> num_kraus * d``, cut into d x d blocks."""
    n = check_num_qubits(n)
    d = 2**n
    if int(num_kraus) != num_kraus or not 1 <= num_kraus <= d * d:
        raise ChannelError(f"num_kraus must be an integer in [1, {d * d}], got {num_kraus!r}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(num_kraus * d, d)) + 1j * rng.normal(size=(num_kraus * d, d))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    spec = {"model": "random", "params": {"n": n, "num_kraus": int(num_kraus), "seed": seed}}
    return KrausChannel(q.reshape(num_kraus, d, d), spec=spec)


def unitary_channel(u, spec: dict | None = None) -> KrausChannel:
    return KrausChannel(np.asarray(u, dtype=complex), spec=spec)


MODELS: dict[str, Callable[..., KrausChannel]] = {
    "identity": identity,
    "amplitude_damping": amplitude_damping,
    "bit_flip": bit_flip,
    "phase_flip": phase_flip,
    "depolarizing": depolarizing,
    "correlated_pauli": correlated_pauli,
    "correlated_depolarizing": correlated_depolarizing,
    "random": random_channel,
}


def build_model(spec: dict | str, **params) -> KrausChannel:
    """Build a zoo channel from ``{"model": name, "params": {...}}`` or ``name, **params``."""
    if isinstance(spec, str):
        name = spec
    else:
        name = spec.get("model")
        params = {**spec.get("params", {}), **params}
    try:
        factory = MODELS[name]
    except KeyError:
        raise ChannelError(f"unknown channel model {name!r}; choose from {sorted(MODELS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ChannelError(f"bad parameters for model {name!r}: {exc}") from None


def state_after(ch: KrausChannel | PauliTransferMatrix, rho) -> np.ndarray:
    """Apply either representation to a validated density matrix."""
    rho = validate_density_matrix(rho, ch.n)
    if isinstance(ch, PauliTransferMatrix):
        return ptm_apply(ch, rho)
    return kraus_apply(ch, rho)
