"""JSON encodings of the domain types.

Complex entries are ``[re, im]`` pairs and matrices nested row-major lists.
``json`` writes floats with their shortest round-tripping repr, so every
``load(dump(x)) == x`` holds bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .certify.report import CertReport, CertStatus
from .linalg import DensityMatrix
from .network import Network
from .states import CovarianceMatrix, Decomposition, MeasurementCollection, pauli_measurements


class FormatError(ValueError):
    """Input JSON has the wrong shape or content."""


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise FormatError("complex arrays must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _matrix(data, what: str) -> np.ndarray:
    m = decode_complex(data)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FormatError(f"{what} must be a square matrix")
    return m


def state_to_dict(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "matrix": encode_complex(rho.matrix)}


def state_from_dict(data: dict) -> DensityMatrix:
    try:
        return DensityMatrix(tuple(int(d) for d in data["dims"]), _matrix(data["matrix"], "state"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad state record: {exc}") from exc


def measurements_to_dict(m: MeasurementCollection) -> dict:
    return {"parties": [[encode_complex(a) for a in obs] for obs in m.observables]}


def measurements_from_dict(data: dict) -> MeasurementCollection:
    try:
        parties = data["parties"]
        return MeasurementCollection(tuple(tuple(_matrix(a, "observable") for a in obs) for obs in parties))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad measurement record: {exc}") from exc


def network_to_dict(g: Network) -> dict:
    return g.to_dict()


def network_from_dict(data: dict) -> Network:
    try:
        return Network.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad network record: {exc}") from exc


def covariance_to_dict(gamma: CovarianceMatrix) -> dict:
    return {"sizes": list(gamma.sizes), "matrix": np.asarray(gamma.matrix, dtype=float).tolist()}


def covariance_from_dict(data: dict) -> CovarianceMatrix:
    try:
        return CovarianceMatrix(np.asarray(data["matrix"], dtype=float).reshape(
            (sum(data["sizes"]),) * 2), tuple(int(s) for s in data["sizes"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad covariance record: {exc}") from exc


def decomposition_to_dict(dec: Decomposition) -> dict:
    return {"weights": list(dec.weights), "components": [state_to_dict(c) for c in dec.components]}


def decomposition_from_dict(data: dict) -> Decomposition:
    return Decomposition(tuple(data["weights"]), tuple(state_from_dict(c) for c in data["components"]))


def provenance_to_dict(prov: dict[str, Any]) -> dict:
    out = {}
    for key, val in prov.items():
        if key in ("source_states", "local_unitaries"):
            out[key] = [None if v is None else encode_complex(v) for v in val]
        elif isinstance(val, tuple):
            out[key] = list(val)
        else:
            out[key] = val
    return out


def provenance_from_dict(data: dict) -> dict[str, Any]:
    out = dict(data)
    for key in ("source_states", "local_unitaries"):
        if key in out:
            out[key] = [None if v is None else decode_complex(v) for v in out[key]]
    if "party_dims" in out:
        out["party_dims"] = tuple(out["party_dims"])
    return out


def report_to_dict(rep: CertReport) -> dict:
    return rep.to_dict()


def report_from_dict(data: dict) -> CertReport:
    return CertReport(data["criterion"], data["target"], CertStatus(data["status"]),
                      float(data["margin"]), dict(data.get("details", {})))


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, allow_nan=True)


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def load_state(path) -> DensityMatrix:
    return state_from_dict(load_json(path))


def load_network(spec: str) -> Network:
    """A network file, or one of ``triangle``, ``cycle:N``, ``star:N``."""
    from . import network as nw

    if spec == "triangle":
        return nw.triangle()
    for prefix, make in (("cycle:", nw.cycle), ("star:", nw.star)):
        if spec.startswith(prefix):
            return make(int(spec[len(prefix):]))
    return network_from_dict(load_json(spec))


def load_measurements(spec: str, n_parties: int | None = None) -> MeasurementCollection:
    """A measurement file, or ``pauli:X`` for one Pauli observable per qubit party."""
    if spec.startswith("pauli:"):
        if n_parties is None:
            raise FormatError("pauli shorthand needs the number of parties")
        return pauli_measurements(n_parties, spec.split(":", 1)[1])
    return measurements_from_dict(load_json(spec))
