"""Verification reports: named items with computed and expected values."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class Report:
    command: str
    items: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, name: str, computed: Any, expected: Any, deviation: float, tol: float) -> bool:
        ok = bool(math.isfinite(deviation) and deviation <= tol)
        self.items.append({
            "name": name,
            "computed": computed,
            "expected": expected,
            "deviation": float(deviation) if math.isfinite(deviation) else None,
            "tolerance": tol,
            "pass": ok,
        })
        return ok

    def flag(self, name: str, computed: bool, expected: bool = True) -> bool:
        return self.check(name, bool(computed), bool(expected), 0.0 if bool(computed) == bool(expected) else 1.0, 0.0)

    @property
    def passed(self) -> bool:
        return all(item["pass"] for item in self.items)

    @property
    def max_deviation(self) -> Optional[float]:
        devs = [item["deviation"] for item in self.items if item["deviation"] is not None]
        return max(devs) if devs else None

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            **self.data,
            "items": self.items,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
        }
