"""Law-suite outcome types.

A LawReport is the machine-readable result of one suite run: instance
counts, violations with both sides' canonical payloads, and the bounds
that produced it.  Reports never raise on a law failure; bound overruns
inside a suite are recorded as notes unless the caller asked otherwise.
"""

from dataclasses import dataclass, field


@dataclass
class Bounds:
    """Quantification limits shared by the law suites."""

    max_size: int = 3
    expr_len: int = 1
    enum_cap: int = 100_000
    samples: int = 8
    seed: int = 0
    depth: int = 4
    karoubi_cap: int = 4
    member_cap: int = 20_000

    def as_dict(self):
        return {
            "max_size": self.max_size,
            "expr_len": self.expr_len,
            "enum_cap": self.enum_cap,
            "samples": self.samples,
            "seed": self.seed,
            "depth": self.depth,
            "karoubi_cap": self.karoubi_cap,
            "member_cap": self.member_cap,
        }


@dataclass
class Violation:
    law: str
    instance: str
    lhs: str
    rhs: str
    trace: str = None

    def as_dict(self):
        d = {"law": self.law, "instance": self.instance,
             "lhs": self.lhs, "rhs": self.rhs}
        if self.trace is not None:
            d["trace"] = self.trace
        return d


@dataclass
class LawReport:
    suite: str
    model: str
    bounds: dict = field(default_factory=dict)
    cases_total: int = 0
    violations: list = field(default_factory=list)
    elapsed_ms: int = 0
    notes: list = field(default_factory=list)

    @property
    def cases_failed(self):
        return len(self.violations)

    @property
    def passed(self):
        return not self.violations

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"

    def record(self, law, instance, lhs, rhs, trace=None):
        """Count one case; file a violation when the sides differ.

        lhs/rhs are Morphisms (or any objects with stable repr via
        render); equality is the structural one.
        """
        self.cases_total += 1
        if lhs != rhs:
            self.violations.append(Violation(
                law, instance, render(lhs), render(rhs), trace))
            return False
        return True

    def fail(self, law, instance, lhs, rhs, trace=None):
        self.cases_total += 1
        self.violations.append(Violation(
            law, instance, render(lhs), render(rhs), trace))

    def note(self, text):
        if text not in self.notes:
            self.notes.append(text)

    def as_dict(self):
        return {
            "suite": self.suite,
            "model": self.model,
            "bounds": self.bounds,
            "cases_total": self.cases_total,
            "cases_failed": self.cases_failed,
            "status": self.status,
            "violations": [v.as_dict() for v in self.violations],
            "notes": list(self.notes),
            "elapsed_ms": self.elapsed_ms,
        }

    def summary_line(self):
        extra = f", notes: {'; '.join(self.notes)}" if self.notes else ""
        return (f"[{self.status}] {self.suite} on {self.model}: "
                f"{self.cases_total} cases, "
                f"{self.cases_failed} failures{extra}")


RENDER_LIMIT = 2000


def render(value):
    """Deterministic short text for one side of a violation."""
    from .kernel import Morphism
    if isinstance(value, Morphism):
        text = f"{value.dom!r}->{value.cod!r}:{_payload_str(value)}"
    else:
        text = repr(value) if not isinstance(value, str) else value
    if len(text) > RENDER_LIMIT:
        text = text[:RENDER_LIMIT] + f"...<{len(text)} chars>"
    return text


def _payload_str(m):
    p = m.model.payload_canon(m.payload)
    return repr(p)
