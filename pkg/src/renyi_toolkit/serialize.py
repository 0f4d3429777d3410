"""JSON interchange for matrices, states, ensembles and check witnesses.

Matrices travel as {"dim": n, "re": [[...]], "im": [[...]]}; states add a
"profile" field; ensembles pair "probs" with a list of state payloads.
Witness dictionaries (the inputs of one harness trial) are encoded with
type tags so they can be reloaded and re-evaluated exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .matcore import HermitianOperator, matrix_from_json, matrix_to_json
from .states import DensityOperator, Ensemble, PureState

__all__ = [
    "state_to_json",
    "state_from_json",
    "ensemble_to_json",
    "ensemble_from_json",
    "pure_state_to_json",
    "pure_state_from_json",
    "encode_witness",
    "decode_witness",
    "load_json",
    "dump_json",
]


def state_to_json(state: DensityOperator) -> dict:
    payload = matrix_to_json(state.mat)
    payload["profile"] = list(state.profile)
    return payload


def state_from_json(data: dict) -> DensityOperator:
    mat = matrix_from_json(data)
    profile = tuple(int(p) for p in data.get("profile", [int(data["dim"])]))
    return DensityOperator(HermitianOperator(mat), profile)


def pure_state_to_json(state: PureState) -> dict:
    return {
        "amplitudes_re": state.amplitudes.real.tolist(),
        "amplitudes_im": state.amplitudes.imag.tolist(),
        "profile": list(state.profile),
    }


def pure_state_from_json(data: dict) -> PureState:
    amps = np.asarray(data["amplitudes_re"], dtype=float) + 1j * np.asarray(
        data["amplitudes_im"], dtype=float
    )
    return PureState(amps, tuple(int(p) for p in data["profile"]))


def ensemble_to_json(ensemble: Ensemble) -> dict:
    return {
        "probs": ensemble.probs.tolist(),
        "states": [state_to_json(s) for s in ensemble.states],
    }


def ensemble_from_json(data: dict) -> Ensemble:
    states = tuple(state_from_json(s) for s in data["states"])
    return Ensemble(np.asarray(data["probs"], dtype=float), states)


def encode_witness(inputs: dict) -> dict:
    """Tag-and-serialize a dictionary of trial inputs."""
    out: dict[str, Any] = {}
    for key, value in inputs.items():
        if isinstance(value, DensityOperator):
            out[key] = {"__state__": state_to_json(value)}
        elif isinstance(value, PureState):
            out[key] = {"__pure__": pure_state_to_json(value)}
        elif isinstance(value, Ensemble):
            out[key] = {"__ensemble__": ensemble_to_json(value)}
        elif isinstance(value, HermitianOperator):
            out[key] = {"__operator__": matrix_to_json(value.mat)}
        elif isinstance(value, np.ndarray):
            out[key] = {"__matrix__": matrix_to_json(value)}
        elif isinstance(value, (bool, int, float, str)) or value is None:
            out[key] = value
        elif isinstance(value, (tuple, list)):
            out[key] = {"__list__": [encode_witness({"v": v})["v"] for v in value]}
        else:
            raise TypeError(f"cannot serialize witness value of type {type(value)!r}")
    return out


def decode_witness(data: dict) -> dict:
    out: dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            if "__state__" in value:
                out[key] = state_from_json(value["__state__"])
            elif "__pure__" in value:
                out[key] = pure_state_from_json(value["__pure__"])
            elif "__ensemble__" in value:
                out[key] = ensemble_from_json(value["__ensemble__"])
            elif "__operator__" in value:
                out[key] = HermitianOperator(matrix_from_json(value["__operator__"]))
            elif "__matrix__" in value:
                out[key] = matrix_from_json(value["__matrix__"])
            elif "__list__" in value:
                out[key] = [decode_witness({"v": v})["v"] for v in value["__list__"]]
            else:
                raise ValueError(f"unknown witness tag in {key!r}")
        else:
            out[key] = value
    return out


def dump_json(data, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
