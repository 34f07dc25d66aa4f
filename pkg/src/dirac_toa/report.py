"""Structured pass/fail reports for the command-line checks.

Report files must be byte-identical across reruns of the same config, so the
file rendering omits wall-clock runtimes; the stdout rendering includes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    passed: bool
    runtime: float
    comparator: str = "<"

    def line(self, include_runtime: bool) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} {self.name}: measured={self.measured:.17g} "
            f"{self.comparator} threshold={self.threshold:.17g}"
        )
        if include_runtime:
            text += f" [{self.runtime:.2f}s]"
        return text


@dataclass
class Report:
    title: str
    checks: List[CheckResult] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(
        self,
        name: str,
        measured: float,
        threshold: float,
        runtime: float = 0.0,
        comparator: str = "<",
    ) -> CheckResult:
        if comparator == "<":
            passed = measured < threshold
        elif comparator == "<=":
            passed = measured <= threshold
        elif comparator == "==0":
            passed = measured == 0.0
        else:
            raise ValueError(f"unknown comparator {comparator!r}")
        result = CheckResult(name, float(measured), float(threshold), passed, runtime, comparator)
        self.checks.append(result)
        return result

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self, include_runtime: bool = False) -> str:
        lines = [f"report: {self.title}"]
        lines.extend(f"note: {n}" for n in self.notes)
        lines.extend(c.line(include_runtime) for c in self.checks)
        verdict = "OK" if self.all_passed else "FAILED"
        lines.append(f"result: {verdict} ({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)")
        return "\n".join(lines) + "\n"
