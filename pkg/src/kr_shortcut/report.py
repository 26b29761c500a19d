from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass
class Report:
    """Outcome of a verifier: violations fail it, warnings do not."""

    name: str
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, msg: str) -> None:
        self.violations.append(msg)

    def warn(self, msg: str) -> None:
        self.warnings.append(msg)

    def merge(self, other: "Report") -> None:
        self.violations += [f"{other.name}: {m}" for m in other.violations]
        self.warnings += [f"{other.name}: {m}" for m in other.warnings]
        for k, v in other.stats.items():
            self.stats[f"{other.name}.{k}"] = v

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "violations": list(self.violations),
            "warnings": list(self.warnings),
            "stats": dict(self.stats),
        }

    def __str__(self) -> str:
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {status}"
