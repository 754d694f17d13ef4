"""JSON and CSV formats for channels, PTMs, state families and tomography results.

Complex matrices are nested lists of ``[re, im]`` pairs; real matrices are
plain row-major nested lists.
"""
from __future__ import annotations

import csv
import io
import json
import os
from typing import Mapping

import numpy as np

from .channels import (
    ChannelError,
    ChoiMatrix,
    KrausChannel,
    PauliTransferMatrix,
    build_model,
)
from .planning import Configuration, Prior, PriorLevel
from .states import Protocol, StateFamily
from .tomography import Estimate, TomographyResult


def encode_complex_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex_matrix(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValueError("complex matrices must be nested lists of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _jsonable(obj):
    """Recursively turn numpy scalars and arrays into plain Python values."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.random.SeedSequence):
        return obj.entropy
    return obj


# -- channels --------------------------------------------------------------------------


def channel_from_spec(spec: Mapping) -> KrausChannel:
    """Build a channel from ``{"model": ..., "params": ...}`` or ``{"kraus": ..., "n": ...}``."""
    if "kraus" in spec:
        ops = decode_complex_matrix(spec["kraus"])
        ch = KrausChannel(ops, spec={"kraus": "explicit"})
        if "n" in spec and int(spec["n"]) != ch.n:
            raise ChannelError(f"spec says n = {spec['n']} but the Kraus operators act on {ch.n} qubits")
        return ch
    if "model" in spec:
        return build_model(dict(spec))
    raise ChannelError("channel spec needs a 'model' or a 'kraus' key")


def channel_to_json(ch: KrausChannel) -> dict:
    return {"n": ch.n, "kraus": encode_complex_matrix(ch.operators), "spec": _jsonable(ch.spec)}


def _parse_value(key: str, text: str):
    if key == "p_vec":
        return [float(v) for v in text.split(":")]
    if key in ("n", "num_kraus", "seed"):
        return int(text)
    return float(text)


def parse_inline_spec(text: str) -> dict:
    """``"model=correlated_depolarizing,p=0.25,mu=0.75"`` -> channel spec dict.

    ``p_vec`` takes colon-separated values, e.g. ``p_vec=0.7:0.1:0.1:0.1``.
    """
    params, model = {}, None
    for part in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"expected key=value in channel spec, got {part!r}")
        key = key.strip()
        if key == "model":
            model = value.strip()
        else:
            try:
                params[key] = _parse_value(key, value.strip())
            except ValueError:
                raise ValueError(f"bad value for {key!r}: {value!r}") from None
    if model is None:
        raise ValueError(f"inline channel spec {text!r} has no model=...")
    return {"model": model, "params": params}


def load_channel(source: str) -> KrausChannel:
    """Channel from a JSON spec file path or an inline ``model=...`` string."""
    if os.path.exists(source):
        with open(source) as fh:
            spec = json.load(fh)
        return channel_from_spec(spec)
    if "=" in source:
        return channel_from_spec(parse_inline_spec(source))
    raise ValueError(f"{source!r} is neither a file nor an inline model=... spec")


def ptm_to_json(ptm: PauliTransferMatrix) -> dict:
    return {"n": ptm.n, "gamma": ptm.gamma.tolist(), "spec": _jsonable(ptm.spec)}


def ptm_from_json(obj: Mapping, *, check: bool = True) -> PauliTransferMatrix:
    ptm = PauliTransferMatrix(np.asarray(obj["gamma"], dtype=float), spec=obj.get("spec"), check=check)
    if "n" in obj and int(obj["n"]) != ptm.n:
        raise ChannelError(f"PTM export says n = {obj['n']} but gamma is for {ptm.n} qubits")
    return ptm


def choi_to_json(choi: ChoiMatrix) -> dict:
    return {"n": choi.n, "choi": encode_complex_matrix(choi.entries)}


# -- state families ------------------------------------------------------------------------


def state_family_to_json(family: StateFamily) -> dict:
    return {
        "protocol": str(family.protocol),
        "n": family.n,
        "states": [encode_complex_matrix(rho) for rho in family.states],
    }


def state_family_from_json(obj: Mapping) -> StateFamily:
    states = np.stack([decode_complex_matrix(s) for s in obj["states"]])
    return StateFamily(Protocol(obj["protocol"]), int(obj["n"]), states)


def beta_to_json(family: StateFamily) -> dict:
    return {
        "protocol": str(family.protocol),
        "n": family.n,
        "beta": family.beta.tolist(),
        "beta_inv": family.beta_inv.tolist(),
    }


# -- tomography results ------------------------------------------------------------------


def result_to_json(result: TomographyResult) -> dict:
    costs = result.entry_costs()
    return {
        "protocol": str(result.protocol),
        "n": result.n,
        "prior": result.prior.to_json(),
        "master_seed": result.master_seed,
        "shots": "exact" if result.shots is None else result.shots,
        "configurations": [{"i": c.i, "j": c.j} for c in result.configurations],
        "configuration_count": result.configuration_count,
        "entries": [
            {
                "i": i,
                "j": j,
                "value": result.estimates[i, j].value,
                "std_error": result.estimates[i, j].std_error,
                "n_configs_used": costs[i, j],
            }
            for i, j in result.entries
        ],
    }


def result_from_json(obj: Mapping) -> TomographyResult:
    protocol = Protocol(obj["protocol"])
    prior_obj = obj.get("prior", {"level": "cptp"})
    prior = Prior(
        PriorLevel[prior_obj["level"].upper()],
        {(k["i"], k["j"]): k["value"] for k in prior_obj.get("known", [])},
    )
    shots = None if obj.get("shots") in (None, "exact") else int(obj["shots"])
    entries = tuple((int(e["i"]), int(e["j"])) for e in obj["entries"])
    estimates = {(int(e["i"]), int(e["j"])): Estimate(e["value"], e["std_error"], shots) for e in obj["entries"]}
    configs = tuple(Configuration(c["i"], c["j"], protocol, shots) for c in obj.get("configurations", []))
    return TomographyResult(
        protocol, int(obj["n"]), prior, entries, estimates, configs, obj.get("master_seed"), shots
    )


CSV_COLUMNS = ("i", "j", "gamma_hat", "std_error", "n_configs_used")


def results_to_csv(results: Mapping[str, TomographyResult] | TomographyResult) -> str:
    """CSV with one row per entry; a ``protocol`` column leads when several results are given."""
    if isinstance(results, TomographyResult):
        results = {str(results.protocol): results}
    multi = len(results) > 1
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((("protocol",) if multi else ()) + CSV_COLUMNS)
    for name, result in results.items():
        costs = result.entry_costs()
        for i, j in result.entries:
            est = result.estimates[i, j]
            row = (i, j, repr(est.value), repr(est.std_error), costs[i, j])
            writer.writerow(((name,) if multi else ()) + row)
    return buf.getvalue()


def comparison_block(results: Mapping[str, TomographyResult], reference: PauliTransferMatrix | None) -> dict:
    """Side-by-side per-entry values, configuration counts and deviations from ``reference``."""
    entries = sorted(set().union(*(r.entries for r in results.values())))
    rows = []
    for i, j in entries:
        row = {"i": i, "j": j}
        if reference is not None:
            row["analytic"] = float(reference.gamma[i, j])
        for name, result in results.items():
            est = result.estimates.get((i, j))
            if est is None:
                continue
            cell = {"value": est.value, "std_error": est.std_error}
            if reference is not None:
                cell["deviation"] = est.value - float(reference.gamma[i, j])
                cell["deviation_in_se"] = (
                    cell["deviation"] / est.std_error if est.std_error > 0 else None
                )
            row[name] = cell
        rows.append(row)
    return {
        "configuration_counts": {name: r.configuration_count for name, r in results.items()},
        "entries": rows,
    }


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2)
