import numpy as np
import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(criterion: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((criterion, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    d = 2**n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def brute_force_ptm(ops, n: int) -> np.ndarray:
    """(1/d) Tr[P_i sum_a A P_j A^dag], one entry at a time."""
    from dptm.pauli import pauli_basis

    d = 2**n
    basis = pauli_basis(n)
    out = np.zeros((d * d, d * d))
    for j, pj in enumerate(basis):
        image = sum(a @ pj @ a.conj().T for a in ops)
        for i, pi in enumerate(basis):
            out[i, j] = np.trace(pi @ image).real / d
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
