"""Structured pass/fail reports produced by the verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """One verification check: a verdict plus the measured quantities behind it."""

    name: str
    passed: bool
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    not_applicable: bool = False

    def add(self, line: str):
        self.lines.append(line)

    @property
    def verdict(self) -> str:
        if self.not_applicable:
            return "NOT APPLICABLE"
        return "PASS" if self.passed else "FAIL"

    def render(self) -> str:
        out = [f"[{self.verdict}] {self.name}"]
        out.extend(f"    {line}" for line in self.lines)
        return "\n".join(out)
