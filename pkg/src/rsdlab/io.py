"""JSON file formats for instances, orders, assignments and cutoffs."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .market import Assignment, CutoffVector, MarketInstance, Permutation, validate_instance


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def read_instance(path) -> MarketInstance:
    with open(path) as fh:
        raw = json.load(fh)
    return validate_instance(raw)


def write_instance(inst: MarketInstance, path) -> None:
    Path(path).write_text(dumps(inst.to_dict()))


def permutation_to_json(pi: Permutation) -> list[int]:
    return pi.student_at.tolist()


def permutation_from_json(data) -> Permutation:
    return Permutation.from_order(data)


def assignment_to_json(a: Assignment) -> dict:
    return {
        "school_of": a.school_of.tolist(),
        "seats_filled": a.seats_filled.tolist(),
        "exhaustion_rank": [None if r < 0 else int(r) for r in a.exhaustion_rank],
    }


def cutoffs_to_json(c: CutoffVector) -> dict:
    return {"gamma": c.gamma.tolist(), "binding": c.binding.tolist()}
