"""Outcome records shared by the estimators."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

COUNT = "Count"
TOO_DENSE = "TooDense"
RTE = "RTE"


@dataclass(frozen=True)
class Outcome:
    """Result of an exact enumeration attempt."""
    tag: str
    value: Optional[int] = None

    @property
    def is_count(self) -> bool:
        return self.tag == COUNT

    def __repr__(self):
        return f"Count({self.value})" if self.tag == COUNT else self.tag


def count(v: int) -> Outcome:
    return Outcome(COUNT, v)


TOO_DENSE_OUT = Outcome(TOO_DENSE)
RTE_OUT = Outcome(RTE)


@dataclass
class Estimate:
    value: Union[Fraction, int, float, None]
    status: str = "ok"             # ok | RTE
    halted_i: Optional[int] = None
    cost: Union[int, float] = 0
    queries: int = 0
    seed: Optional[int] = None
    stream: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok" and self.value is not None

    def as_number(self):
        """Numeric value, with failures mapped to -1 as in median boosting."""
        return self.value if self.ok else -1

    def to_record(self, exact=None) -> dict:
        rec = {
            "estimate": _jsonable(self.value) if self.ok else self.status,
            "exact": exact,
            "cost": _jsonable(self.cost),
            "queries": self.queries,
            "halted_i": self.halted_i,
            "seed": self.seed,
            "stream": self.stream,
        }
        return rec


def _jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def within_eps(est, exact, eps) -> bool:
    if est is None or isinstance(est, str):
        return False
    return abs(Fraction(est) - exact) <= Fraction(eps) * exact if not isinstance(est, float) \
        else abs(est - exact) <= float(eps) * exact
