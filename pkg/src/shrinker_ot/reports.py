"""Report container for inequality checks.

Every check in the package returns a BoundReport: the two sides of the
inequality, the named constants that entered the right-hand side, and enough
discretization metadata to reproduce the run.
"""

from dataclasses import dataclass, field


@dataclass
class BoundReport:
    theorem_id: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tolerance: float
    constants: dict = field(default_factory=dict)
    discretization: dict = field(default_factory=dict)

    def to_dict(self):
        """Plain-dict form used by the JSON/CSV serializers."""
        return {
            "theorem_id": self.theorem_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "constants": dict(self.constants),
            "discretization": dict(self.discretization),
        }


def make_report(theorem_id, lhs, rhs, tolerance, constants=None, discretization=None,
                extra_pass=True):
    """Assemble a report; passed means lhs <= rhs + tolerance.

    extra_pass lets callers AND in additional conditions (drift caps etc.)
    without changing the margin bookkeeping.
    """
    lhs = float(lhs)
    rhs = float(rhs)
    return BoundReport(
        theorem_id=theorem_id,
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        passed=bool(lhs <= rhs + tolerance) and bool(extra_pass),
        tolerance=float(tolerance),
        constants=dict(constants or {}),
        discretization=dict(discretization or {}),
    )
