"""Expectation values, shot sampling and PTM reconstruction (DPTM and sQPT)."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .channels import KrausChannel, PauliTransferMatrix, kraus_apply, kraus_to_ptm
from .pauli import pauli_matrix, vectorize
from .planning import (
    Configuration,
    Prior,
    all_entries,
    entry_cost,
    plan_configurations,
)
from .states import Protocol, input_state, sqpt_column

PROB_TOL = 1e-9
EXACT_TOL = 1e-10

_PROTOCOL_CODES = {Protocol.DPTM: 0, Protocol.SQPT: 1}


class MissingMeasurementError(LookupError):
    """A reconstruction formula needs a configuration that was not measured."""


class ParameterRangeWarning(UserWarning):
    """An extracted channel parameter fell outside its physical range."""


@dataclass(frozen=True)
class Estimate:
    """A measured (or exact) value with its standard error."""

    value: float
    std_error: float = 0.0
    shots: int | None = None

    @property
    def exact(self) -> bool:
        return self.shots is None

    def to_json(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "shots": self.shots}


# -- expectation values ------------------------------------------------------------------


def exact_expectation(
    ch: KrausChannel | PauliTransferMatrix,
    i: int,
    j: int,
    protocol: Protocol | str,
    *,
    cross_check: bool = False,
) -> float:
    """``Tr[P_i Phi(rho_j)]`` with ``rho_j`` from the protocol's input family.

    A Kraus channel is evaluated by a dense trace, a PTM by ``(gamma @ vec(rho_j))_i``.
    With ``cross_check`` a Kraus channel is evaluated both ways and the two
    must agree within ``EXACT_TOL``.
    """
    rho = input_state(protocol, j, ch.n)
    if isinstance(ch, PauliTransferMatrix):
        return float(ch.gamma[i] @ vectorize(rho))
    out = kraus_apply(ch, rho)
    value = np.sum(pauli_matrix(i, ch.n).T * out)
    if abs(value.imag) > EXACT_TOL:
        raise ValueError(f"expectation value has imaginary part {value.imag:.3g}")
    if cross_check:
        other = float(kraus_to_ptm(ch).gamma[i] @ vectorize(rho))
        if abs(other - value.real) > EXACT_TOL:
            raise AssertionError(
                f"dense trace {value.real:.15g} and PTM route {other:.15g} disagree"
            )
    return float(value.real)


def configuration_seed(master_seed: int, cfg: Configuration) -> np.random.SeedSequence:
    """Per-configuration stream, independent of plan size and evaluation order."""
    return np.random.SeedSequence([int(master_seed), _PROTOCOL_CODES[cfg.protocol], cfg.i, cfg.j])


def sample_expectation(expectation: float, shots: int, seed) -> Estimate:
    """Sample ``shots`` +/-1 outcomes with ``p(+1) = (1 + expectation)/2``.

    Returns the mean outcome with standard error ``sqrt((1 - value**2)/shots)``.
    """
    if int(shots) != shots or shots < 2:
        raise ValueError(f"shots must be an integer >= 2, got {shots!r}")
    p_plus = (1.0 + expectation) / 2.0
    if not -PROB_TOL <= p_plus <= 1 + PROB_TOL:
        raise ValueError(
            f"expectation {expectation:.12g} gives outcome probability {p_plus:.12g} outside [0, 1]"
        )
    p_plus = min(max(p_plus, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    n_plus = int(rng.binomial(shots, p_plus))
    value = (2 * n_plus - shots) / shots
    return Estimate(value, math.sqrt(max(0.0, 1.0 - value * value) / shots), int(shots))


def sample_configuration(ch: KrausChannel | PauliTransferMatrix, cfg: Configuration, rng_seed) -> Estimate:
    if cfg.i == 0:
        raise ValueError("the identity observable is never sampled; <P_0> = Tr[Phi(rho)]")
    if cfg.shots is None:
        raise ValueError("configuration has no shot budget; use exact_expectation")
    return sample_expectation(exact_expectation(ch, cfg.i, cfg.j, cfg.protocol), cfg.shots, rng_seed)


# -- reconstruction --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TomographyResult:
    protocol: Protocol
    n: int
    prior: Prior
    entries: tuple[tuple[int, int], ...]
    estimates: Mapping[tuple[int, int], Estimate]
    configurations: tuple[Configuration, ...] = ()
    master_seed: int | None = None
    shots: int | None = None
    measurements: Mapping[tuple[int, int], Estimate] = field(default_factory=dict, repr=False)

    @property
    def configuration_count(self) -> int:
        return len(self.configurations)

    def __getitem__(self, entry: tuple[int, int]) -> Estimate:
        return self.estimates[entry]

    def value(self, i: int, j: int) -> float:
        return self.estimates[i, j].value

    def std_error(self, i: int, j: int) -> float:
        return self.estimates[i, j].std_error

    def entry_costs(self) -> dict[tuple[int, int], int]:
        return {e: entry_cost(self.protocol, *e, self.n, self.prior) for e in self.entries}

    def as_matrix(self) -> np.ndarray:
        """Dense PTM estimate; entries that were not requested are NaN."""
        out = np.full((4**self.n, 4**self.n), np.nan)
        for (i, j), est in self.estimates.items():
            out[i, j] = est.value
        return out

    def __eq__(self, other):
        if not isinstance(other, TomographyResult):
            return NotImplemented
        return (
            self.protocol == other.protocol
            and self.n == other.n
            and self.prior == other.prior
            and self.entries == other.entries
            and dict(self.estimates) == dict(other.estimates)
            and self.configurations == other.configurations
            and self.master_seed == other.master_seed
            and self.shots == other.shots
        )


def _normalize_entries(entries, n: int) -> tuple[tuple[int, int], ...]:
    if isinstance(entries, str):
        if entries != "full":
            raise ValueError(f"entries must be a list of (i, j) pairs or 'full', got {entries!r}")
        return tuple(all_entries(n))
    out = []
    for i, j in entries:
        if not (0 <= i < 4**n and 0 <= j < 4**n):
            raise ValueError(f"PTM entry ({i}, {j}) out of range for n = {n}")
        out.append((int(i), int(j)))
    return tuple(sorted(set(out)))


def _lookup(measurements, i: int, k: int, entry) -> Estimate:
    try:
        return measurements[i, k]
    except KeyError:
        raise MissingMeasurementError(
            f"gamma{entry} needs configuration ({i}, {k}), which was not measured"
        ) from None


def _combine(terms: Iterable[tuple[float, Estimate]], constant: float = 0.0) -> Estimate:
    """``constant + sum_k c_k M_k`` with independent-error propagation."""
    value, var = constant, 0.0
    shots = None
    for c, est in terms:
        value += c * est.value
        var += c * c * est.std_error**2
        if est.shots is not None:
            shots = est.shots if shots is None else min(shots, est.shots)
    return Estimate(value, math.sqrt(var), shots)


def reconstruct_dptm(
    measurements: Mapping[tuple[int, int], Estimate],
    entries,
    n: int,
    prior: Prior | str | None = None,
) -> TomographyResult:
    """``gamma_i0 = M_i0`` and ``gamma_ij = M_ij - M_i0`` for ``j != 0``.

    Entries fixed by the prior are filled exactly. A known ``gamma_i0`` (unital
    prior, or an explicit pin) replaces the measured ``M_i0`` in the subtraction.
    Errors add in quadrature, treating ``M_i0`` as independent for every ``j``.
    """
    prior = Prior.parse(prior)
    entries = _normalize_entries(entries, n)
    out = {}
    for i, j in entries:
        fixed = prior.known_value(i, j)
        if fixed is not None:
            out[i, j] = Estimate(fixed)
            continue
        m_ij = _lookup(measurements, i, j, (i, j))
        if j == 0:
            out[i, j] = _combine([(1.0, m_ij)])
            continue
        col0 = prior.known_value(i, 0)
        if col0 is not None:
            out[i, j] = _combine([(1.0, m_ij)], -col0)
        else:
            out[i, j] = _combine([(1.0, m_ij), (-1.0, _lookup(measurements, i, 0, (i, j)))])
    return TomographyResult(Protocol.DPTM, n, prior, entries, out, measurements=dict(measurements))


def reconstruct_sqpt(
    measurements: Mapping[tuple[int, int], Estimate],
    entries,
    n: int,
    prior: Prior | str | None = None,
) -> TomographyResult:
    """``gamma_ij = sum_k M_ik [(beta_Q^-1)^{(x) n}]_kj`` with errors in quadrature."""
    prior = Prior.parse(prior)
    entries = _normalize_entries(entries, n)
    out = {}
    for i, j in entries:
        fixed = prior.known_value(i, j)
        if fixed is not None:
            out[i, j] = Estimate(fixed)
            continue
        terms = [(c, _lookup(measurements, i, k, (i, j))) for k, c in sqpt_column(j, n).items()]
        out[i, j] = _combine(terms)
    return TomographyResult(Protocol.SQPT, n, prior, entries, out, measurements=dict(measurements))


def reconstruct_generic(m: np.ndarray, beta_inv: np.ndarray, alpha_inv: np.ndarray | None = None) -> np.ndarray:
    """Linear-inversion QPT on a full outcome matrix: ``alpha^-1 M beta^-1``."""
    m = np.asarray(m, dtype=float)
    if alpha_inv is not None:
        m = alpha_inv @ m
    return m @ beta_inv


_RECONSTRUCTORS = {Protocol.DPTM: reconstruct_dptm, Protocol.SQPT: reconstruct_sqpt}


def reconstruct(protocol: Protocol | str, measurements, entries, n: int, prior=None) -> TomographyResult:
    return _RECONSTRUCTORS[Protocol(protocol)](measurements, entries, n, prior)


# -- orchestration ------------------------------------------------------------------------


def _measure(ch, cfg: Configuration, master_seed: int) -> Estimate:
    if cfg.i == 0:
        # trace measurement: deterministic, no shot noise
        return Estimate(exact_expectation(ch, 0, cfg.j, cfg.protocol))
    if cfg.shots is None:
        return Estimate(exact_expectation(ch, cfg.i, cfg.j, cfg.protocol))
    return sample_configuration(ch, cfg, configuration_seed(master_seed, cfg))


def run_protocol(
    ch: KrausChannel | PauliTransferMatrix,
    entries,
    protocol: Protocol | str,
    prior: Prior | str | None = None,
    shots: int | str | None = "exact",
    master_seed: int = 0,
    workers: int = 1,
) -> TomographyResult:
    """Plan, measure and reconstruct the requested PTM entries.

    ``shots="exact"`` (or ``None``) uses noiseless expectation values. Each
    configuration draws from its own seed stream derived from
    ``(master_seed, protocol, i, j)``, so results do not depend on ``workers``.
    """
    protocol = Protocol(protocol)
    prior = Prior.parse(prior)
    if shots == "exact":
        shots = None
    n = ch.n
    entries = _normalize_entries(entries, n)
    plan = plan_configurations(entries, protocol, n, prior, shots)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda c: _measure(ch, c, master_seed), plan))
    else:
        values = [_measure(ch, c, master_seed) for c in plan]
    measurements = {c.key: v for c, v in zip(plan, values)}
    result = reconstruct(protocol, measurements, entries, n, prior)
    return TomographyResult(
        protocol,
        n,
        prior,
        entries,
        result.estimates,
        tuple(plan),
        master_seed,
        shots,
        measurements,
    )


# -- parameter extraction ----------------------------------------------------------------


@dataclass(frozen=True)
class CorrelatedDepolarizingParams:
    p: float
    p_err: float
    mu: float
    mu_err: float

    def to_json(self) -> dict:
        return {"p": self.p, "p_err": self.p_err, "mu": self.mu, "mu_err": self.mu_err}


def extract_corr_depol_params(
    g44: Estimate | float, g66: Estimate | float, tol: float = 1e-9
) -> CorrelatedDepolarizingParams:
    """Invert ``gamma_44 = 1 - p`` and ``gamma_66 = (1 - p)(mu p - p + 1)``.

    Errors follow first-order propagation of independent inputs. Values outside
    ``[0, 1]`` are returned unclamped with a :class:`ParameterRangeWarning`.
    """
    g44 = g44 if isinstance(g44, Estimate) else Estimate(float(g44))
    g66 = g66 if isinstance(g66, Estimate) else Estimate(float(g66))
    a, b = g44.value, g66.value
    if a <= tol:
        raise ValueError(f"gamma_44 = {a:.6g} must be positive to extract parameters")
    p = 1.0 - a
    if abs(p) <= tol:
        raise ValueError("gamma_44 = 1 gives p = 0, for which mu is indeterminate")
    mu = (b / a - a) / p
    # d mu / d gamma_66 and d mu / d gamma_44 for mu = (b/a - a)/(1 - a)
    dmu_db = 1.0 / (a * p)
    dmu_da = ((-b / a**2 - 1.0) * p + (b / a - a)) / p**2
    mu_err = math.hypot(dmu_da * g44.std_error, dmu_db * g66.std_error)
    for name, val in (("p", p), ("mu", mu)):
        if not -tol <= val <= 1.0 + tol:
            warnings.warn(f"extracted {name} = {val:.6g} lies outside [0, 1]", ParameterRangeWarning, stacklevel=2)
    return CorrelatedDepolarizingParams(p, g44.std_error, mu, mu_err)

