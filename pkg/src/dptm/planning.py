"""Experimental-configuration planning and cost accounting.

A configuration is one (observable ``P_i``, input state ``rho_j``) pair. The
planner works out which configurations a set of requested PTM entries needs,
given what is already known about the channel, and counts them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .states import SQPT_BETA_INV_1Q, Protocol, sqpt_column


class PriorLevel(enum.IntEnum):
    """Structural knowledge about the channel, ordered by strength."""

    NONE = 0  # nothing assumed, not even trace preservation
    CPTP = 1  # row 0 of the PTM is (1, 0, ..., 0)
    UNITAL = 2  # additionally column 0 is (1, 0, ..., 0)
    PAULI = 3  # additionally the PTM is diagonal

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class Prior:
    """Prior knowledge used to skip configurations.

    ``known`` pins individual PTM entries to fixed values, e.g. zeros implied by
    the structure of a channel model. Known entries are never measured and
    enter reconstructions exactly.
    """

    level: PriorLevel = PriorLevel.CPTP
    known: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        level = self.level
        if isinstance(level, str):
            try:
                level = PriorLevel[level.upper()]
            except KeyError:
                raise ValueError(
                    f"unknown prior {self.level!r}; choose none, cptp, unital or pauli"
                ) from None
        object.__setattr__(self, "level", PriorLevel(level))
        object.__setattr__(
            self, "known", {(int(i), int(j)): float(v) for (i, j), v in dict(self.known).items()}
        )

    @classmethod
    def parse(cls, value: Prior | str | None) -> Prior:
        if isinstance(value, Prior):
            return value
        return cls("cptp" if value is None else value)

    @property
    def unital(self) -> bool:
        return self.level >= PriorLevel.UNITAL

    @property
    def pauli(self) -> bool:
        return self.level >= PriorLevel.PAULI

    def known_value(self, i: int, j: int) -> float | None:
        """Value of ``gamma_ij`` fixed by this prior, or ``None`` if it must be measured."""
        if (i, j) in self.known:
            return self.known[i, j]
        if self.level >= PriorLevel.CPTP and i == 0:
            return float(j == 0)
        if self.level >= PriorLevel.UNITAL and j == 0:
            return float(i == 0)
        if self.level >= PriorLevel.PAULI and i != j:
            return 0.0
        return None

    def to_json(self) -> dict:
        out = {"level": str(self.level)}
        if self.known:
            out["known"] = [{"i": i, "j": j, "value": v} for (i, j), v in sorted(self.known.items())]
        return out

    def __str__(self):
        return str(self.level) + (f"+{len(self.known)} known" if self.known else "")


@dataclass(frozen=True, order=True)
class Configuration:
    """One (observable, input state) pair; ``shots=None`` means exact expectation."""

    i: int
    j: int
    protocol: Protocol = field(default=Protocol.DPTM, compare=False)
    shots: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if self.shots is not None and self.shots < 2:
            raise ValueError(f"shots must be at least 2, got {self.shots}")

    @property
    def key(self) -> tuple[int, int]:
        return self.i, self.j


def _check_entry(i: int, j: int, n: int) -> None:
    if not (0 <= i < 4**n and 0 <= j < 4**n):
        raise ValueError(f"PTM entry ({i}, {j}) out of range for n = {n}")


def required_configurations(
    protocol: Protocol | str, i: int, j: int, n: int, prior: Prior | str | None = None
) -> list[tuple[int, int]]:
    """Configurations ``(i, k)`` whose outcomes combine into ``gamma_ij``.

    Empty when the prior already fixes the entry.
    """
    protocol = Protocol(protocol)
    prior = Prior.parse(prior)
    _check_entry(i, j, n)
    if prior.known_value(i, j) is not None:
        return []
    if protocol is Protocol.DPTM:
        if j == 0 or prior.known_value(i, 0) is not None:
            return [(i, j)]
        return [(i, j), (i, 0)]
    return [(i, k) for k in sqpt_column(j, n)]


def entry_cost(
    protocol: Protocol | str, i: int, j: int, n: int, prior: Prior | str | None = None
) -> int:
    """Number of configurations needed for a single PTM entry."""
    return len(required_configurations(protocol, i, j, n, prior))


def all_entries(n: int) -> list[tuple[int, int]]:
    d2 = 4**n
    return [(i, j) for i in range(d2) for j in range(d2)]


def plan_configurations(
    entries: Iterable[tuple[int, int]] | str,
    protocol: Protocol | str,
    n: int,
    prior: Prior | str | None = None,
    shots: int | None = None,
) -> list[Configuration]:
    """Deduplicated, sorted configurations needed for ``entries`` (or ``"full"``)."""
    protocol = Protocol(protocol)
    if isinstance(entries, str):
        if entries != "full":
            raise ValueError(f"entries must be a list of (i, j) pairs or 'full', got {entries!r}")
        entries = all_entries(n)
    needed = set()
    for i, j in entries:
        needed.update(required_configurations(protocol, i, j, n, prior))
    return [Configuration(i, j, protocol, shots) for i, j in sorted(needed)]


def unitality_test_plan(n: int) -> list[Configuration]:
    """Configurations ``(i, 0)``, ``i >= 1``: the whole non-unital column by DPTM."""
    return [Configuration(i, 0, Protocol.DPTM) for i in range(1, 4**n)]


# -- closed-form counts ----------------------------------------------------------------

_SQPT_COLUMN_NNZ = np.count_nonzero(SQPT_BETA_INV_1Q, axis=0)  # (2, 3, 3, 2)


def sqpt_column_costs(n: int) -> np.ndarray:
    """Nonzero count of every column of ``(beta_Q^-1)^{(x) n}``, as a length-4**n array.

    The count of a Kronecker column is the product of its per-digit counts, so
    this never forms the matrix itself.
    """
    costs = np.ones(1, dtype=np.int64)
    for _ in range(n):
        costs = np.multiply.outer(costs, _SQPT_COLUMN_NNZ).ravel()
    return costs


def entry_cost_bounds(protocol: Protocol | str, n: int, prior: Prior | str | None = None) -> tuple[int, int]:
    """``(min, max)`` cost over entries ``i >= 1`` that still need measuring."""
    protocol = Protocol(protocol)
    prior = Prior.parse(prior)
    if protocol is Protocol.SQPT and not prior.known:
        costs = sqpt_column_costs(n)
        if prior.level >= PriorLevel.UNITAL:
            costs = costs[1:]
        return int(costs.min()), int(costs.max())
    if protocol is Protocol.DPTM and not prior.known:
        if prior.level >= PriorLevel.UNITAL:
            return 1, 1
        return 1, 2
    costs = [
        entry_cost(protocol, i, j, n, prior)
        for i, j in all_entries(n)
        if i and prior.known_value(i, j) is None
    ]
    return min(costs), max(costs)


def full_plan_size(protocol: Protocol | str, n: int, prior: Prior | str | None = None) -> int:
    """Size of the full-PTM plan without enumerating it (valid for any n)."""
    protocol = Protocol(protocol)
    level = Prior.parse(prior).level
    d2 = 4**n
    if protocol is Protocol.DPTM:
        return {
            PriorLevel.NONE: d2 * d2,
            PriorLevel.CPTP: d2 * (d2 - 1),
            PriorLevel.UNITAL: (d2 - 1) ** 2,
            PriorLevel.PAULI: d2 - 1,
        }[level]
    if level is PriorLevel.PAULI:
        # each diagonal entry needs its own column; rows differ so nothing is shared
        return int(10**n - 2**n)
    # the columns j >= 1 already touch every state, so every (i, k) is used
    rows = d2 if level is PriorLevel.NONE else d2 - 1
    return rows * d2


def table1(n: int) -> dict[str, int]:
    """Full-PTM DPTM plan sizes for each prior level."""
    return {str(level): full_plan_size(Protocol.DPTM, n, level) for level in PriorLevel}


def scaling_table(n_max: int = 8) -> list[dict[str, int]]:
    """Per-entry configuration costs against qubit number, one row per n."""
    rows = []
    for n in range(1, n_max + 1):
        q_min, q_max = entry_cost_bounds(Protocol.SQPT, n)
        d_min, d_max = entry_cost_bounds(Protocol.DPTM, n)
        rows.append(
            {
                "n": n,
                "d": 2**n,
                "full_tomography": 4**n * 4**n,
                "sqpt_min": q_min,
                "sqpt_max": q_max,
                "dptm_min": d_min,
                "dptm_max": d_max,
            }
        )
    return rows
