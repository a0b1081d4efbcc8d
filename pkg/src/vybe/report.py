"""Structured pass/fail reports with explicit coverage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple


@dataclass
class Failure:
    component: str
    instance: Tuple
    witness: Dict[str, Any]


@dataclass
class CheckReport:
    """Outcome of a checker.

    ``coverage`` maps each component id to the instances that were actually
    evaluated; ``skipped`` records instances that fell outside the window.
    A report passes when it has no failures and covered at least one
    instance.
    """

    title: str
    coverage: Dict[str, List[Tuple]] = field(default_factory=dict)
    failures: List[Failure] = field(default_factory=list)
    skipped: Dict[str, List[Tuple]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    info: Dict[str, Any] = field(default_factory=dict)

    def covered(self, component: str, instance: Tuple) -> None:
        self.coverage.setdefault(component, []).append(instance)

    def fail(self, component: str, instance: Tuple, **witness) -> None:
        self.covered(component, instance)
        self.failures.append(Failure(component, instance, witness))

    def skip(self, component: str, instance: Tuple) -> None:
        self.skipped.setdefault(component, []).append(instance)

    def record(self, component: str, instance: Tuple, ok: bool, **witness) -> bool:
        if ok:
            self.covered(component, instance)
        else:
            self.fail(component, instance, **witness)
        return ok

    def merge(self, other: "CheckReport", prefix: str = "") -> None:
        for comp, items in other.coverage.items():
            self.coverage.setdefault(prefix + comp, []).extend(items)
        for comp, items in other.skipped.items():
            self.skipped.setdefault(prefix + comp, []).extend(items)
        for f in other.failures:
            self.failures.append(Failure(prefix + f.component, f.instance, f.witness))
        self.notes.extend(other.notes)

    @property
    def n_covered(self) -> int:
        return sum(len(v) for v in self.coverage.values())

    @property
    def passed(self) -> bool:
        return not self.failures and self.n_covered > 0

    def __bool__(self) -> bool:
        return self.passed

    def failed_components(self) -> List[str]:
        return sorted({f.component for f in self.failures})

    def first_failure(self, component: Optional[str] = None) -> Optional[Failure]:
        for f in self.failures:
            if component is None or f.component == component:
                return f
        return None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.title}: {status} ({self.n_covered} instances checked)"]
        for comp in sorted(set(self.coverage) | set(self.skipped)):
            n = len(self.coverage.get(comp, ()))
            bad = sum(1 for f in self.failures if f.component == comp)
            sk = len(self.skipped.get(comp, ()))
            extra = f", {sk} outside window" if sk else ""
            lines.append(f"  {comp}: {n - bad}/{n} ok{extra}")
        for f in self.failures[:10]:
            lines.append(f"  witness [{f.component}] {f.instance}: {f.witness}")
        if len(self.failures) > 10:
            lines.append(f"  ... {len(self.failures) - 10} more failures")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.summary()
