"""Verification reports shared by the lemma and invariant checkers.

A report counts checked and failed cases and keeps a bounded, sorted list
of failure witnesses.  Merging is associative and commutative, so reports
from independent jobs can be combined in any order with the same result:
counts add, witnesses are re-sorted and truncated, and a detail that
differs between jobs becomes the sorted list of its distinct values.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

__all__ = ["Report", "jsonable"]

MAX_WITNESSES = 20


def jsonable(value: Any) -> Any:
    """Convert nested values to JSON-friendly types with exact rationals as strings."""
    from fractions import Fraction

    from .triadic import Triadic

    if isinstance(value, (Fraction, Triadic)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted(jsonable(v) for v in value)
    if hasattr(value, "to_json"):
        return value.to_json()
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    return value


def _key(w) -> str:
    return json.dumps(jsonable(w), sort_keys=True)


class _Many:
    """Distinct detail values collected by merging; serialised as a sorted list."""

    def __init__(self, items: dict):
        self.items = dict(sorted(items.items()))

    def __eq__(self, other):
        return isinstance(other, _Many) and self.items == other.items

    def to_json(self):
        return [jsonable(v) for v in self.items.values()]


def _values(v) -> dict:
    return dict(v.items) if isinstance(v, _Many) else {_key(v): v}


def _merge_detail(a, b):
    values = {**_values(a), **_values(b)}
    return next(iter(values.values())) if len(values) == 1 else _Many(values)


@dataclass
class Report:
    name: str
    checked: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, witness=None) -> None:
        self.checked += 1
        if not ok:
            self.fail(witness)

    def fail(self, witness=None, count: int = 1) -> None:
        self.failed += count
        if witness is not None and len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def merge(self, other: "Report") -> "Report":
        if other.name != self.name:
            raise ValueError(f"cannot merge report {other.name!r} into {self.name!r}")
        details = dict(self.details)
        for k, v in other.details.items():
            details[k] = _merge_detail(details[k], v) if k in details else v
        witnesses = sorted(self.witnesses + other.witnesses, key=_key)[:MAX_WITNESSES]
        return Report(self.name, self.checked + other.checked, self.failed + other.failed, witnesses, details)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "failed": self.failed,
            "witnesses": jsonable(self.witnesses),
            **{k: jsonable(v) for k, v in sorted(self.details.items())},
        }
