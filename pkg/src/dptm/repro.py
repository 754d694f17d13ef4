"""The two simulated studies: amplitude-damping characterization and
correlated-depolarizing parameter extraction, each run with both protocols."""
from __future__ import annotations

from dataclasses import dataclass, field

from .channels import PauliTransferMatrix, amplitude_damping, correlated_depolarizing, kraus_to_ptm
from .planning import Prior
from .serialization import comparison_block, result_to_json
from .states import Protocol
from .tomography import TomographyResult, extract_corr_depol_params, run_protocol

GATE_SE = 4.0
DEFAULT_SEED = 0

AMP_DAMP_ENTRIES = ((1, 1), (2, 2), (3, 0), (3, 3))
CORR_DEPOL_ENTRIES = ((4, 4), (6, 6))


def amplitude_damping_prior() -> Prior:
    """The damping model has no X or Y component in its non-unital column."""
    return Prior("cptp", known={(1, 0): 0.0, (2, 0): 0.0})


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class ReproReport:
    name: str
    reference: PauliTransferMatrix
    results: dict[str, TomographyResult]
    checks: list[Check] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "results": {k: result_to_json(r) for k, r in self.results.items()},
            "comparison": comparison_block(self.results, self.reference),
            **self.extras,
        }

    def table(self) -> list[dict]:
        """One row per (protocol, entry): the quantities plotted as bars with error bars."""
        rows = []
        for name, result in self.results.items():
            for i, j in result.entries:
                est = result.estimates[i, j]
                rows.append(
                    {
                        "protocol": name,
                        "i": i,
                        "j": j,
                        "analytic": float(self.reference.gamma[i, j]),
                        "value": est.value,
                        "std_error": est.std_error,
                    }
                )
        return rows


def _gate_checks(report: ReproReport) -> None:
    for name, result in report.results.items():
        for i, j in result.entries:
            est = result.estimates[i, j]
            target = float(report.reference.gamma[i, j])
            dev = abs(est.value - target)
            ok = dev <= GATE_SE * est.std_error + 1e-12
            report.checks.append(
                Check(
                    f"{name} gamma[{i},{j}] within {GATE_SE:g} SE",
                    ok,
                    f"{est.value:.4f} +/- {est.std_error:.4f} vs {target:.6f}",
                )
            )


def _count_check(report: ReproReport, expected: dict[str, int]) -> None:
    for name, count in expected.items():
        got = report.results[name].configuration_count
        report.checks.append(
            Check(f"{name} configuration count", got == count, f"{got} (expected {count})")
        )


def repro_amplitude_damping(seed: int = DEFAULT_SEED, shots: int = 512, p: float = 0.25) -> ReproReport:
    ch = amplitude_damping(p)
    results = {
        "dptm": run_protocol(ch, AMP_DAMP_ENTRIES, Protocol.DPTM, amplitude_damping_prior(), shots, seed),
        "sqpt": run_protocol(ch, AMP_DAMP_ENTRIES, Protocol.SQPT, "cptp", shots, seed),
    }
    report = ReproReport("amp-damp", kraus_to_ptm(ch), results, extras={"p": p, "shots": shots, "seed": seed})
    _gate_checks(report)
    _count_check(report, {"dptm": 4, "sqpt": 8})
    return report


def repro_correlated_depolarizing(
    seed: int = DEFAULT_SEED, shots: int = 2048, p: float = 0.25, mu: float = 0.75
) -> ReproReport:
    ch = correlated_depolarizing(p, mu)
    results = {
        "dptm": run_protocol(ch, CORR_DEPOL_ENTRIES, Protocol.DPTM, "unital", shots, seed),
        "sqpt": run_protocol(ch, CORR_DEPOL_ENTRIES, Protocol.SQPT, "cptp", shots, seed),
    }
    report = ReproReport(
        "corr-depol", kraus_to_ptm(ch), results, extras={"p": p, "mu": mu, "shots": shots, "seed": seed}
    )
    _gate_checks(report)
    _count_check(report, {"dptm": 2, "sqpt": 15})
    params = {}
    for name, result in results.items():
        est = extract_corr_depol_params(result[4, 4], result[6, 6])
        params[name] = est.to_json()
        for label, value, err, truth in (("p", est.p, est.p_err, p), ("mu", est.mu, est.mu_err, mu)):
            ok = abs(value - truth) <= GATE_SE * err + 1e-12
            report.checks.append(
                Check(f"{name} extracted {label} within {GATE_SE:g} SE", ok, f"{value:.4f} +/- {err:.4f} vs {truth}")
            )
    report.extras["extracted"] = params
    return report


REPROS = {
    "amp-damp": repro_amplitude_damping,
    "corr-depol": repro_correlated_depolarizing,
}
