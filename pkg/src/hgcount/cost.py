"""Per-query pricing: cost_k(x) = x**alpha_k * sigma(x)."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Union

from .errors import PreconditionError

Number = Union[int, float, Fraction]

SLOW_FACTORS = ("identity", "log", "exp")


def _is_integral(a) -> bool:
    if isinstance(a, int):
        return True
    if isinstance(a, Fraction):
        return a.denominator == 1
    return False


@dataclass(frozen=True)
class CostModel:
    """Query cost model.

    ``alpha`` is either one index for every k or a mapping k -> alpha_k.
    ``slow`` picks the slowly-varying factor:

    * ``identity``: sigma(x) = 1
    * ``log``: sigma(x) = (1 + ln x) ** beta
    * ``exp``: sigma(x) = exp(sign * (ln x) ** gamma), 0 < gamma < 1
    """

    alpha: Union[Number, Mapping[int, Number]] = 0
    slow: str = "identity"
    beta: float = 1.0
    gamma: float = 0.5
    sign: int = 1
    _alpha_items: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.slow not in SLOW_FACTORS:
            raise PreconditionError(f"unknown slow factor {self.slow!r}")
        if self.slow == "exp" and not 0 < self.gamma < 1:
            raise PreconditionError("exp slow factor needs 0 < gamma < 1")
        if self.sign not in (1, -1):
            raise PreconditionError("sign must be +1 or -1")
        if isinstance(self.alpha, Mapping):
            items = tuple(sorted(self.alpha.items()))
        else:
            items = ()
        object.__setattr__(self, "_alpha_items", items)

    def __hash__(self):
        return hash((self._alpha_items or self.alpha, self.slow, self.beta, self.gamma, self.sign))

    def index(self, k: int) -> Number:
        if self._alpha_items:
            table = dict(self._alpha_items)
            if k not in table:
                raise PreconditionError(f"no alpha given for k={k}")
            a = table[k]
        else:
            a = self.alpha
        if not 0 <= a <= k:
            raise PreconditionError(f"alpha_{k}={a} outside [0, {k}]")
        return a

    def is_exact(self, k: int) -> bool:
        return self.slow == "identity" and _is_integral(self.index(k))

    def sigma(self, x) -> float:
        if self.slow == "identity":
            return 1.0
        lx = math.log(x) if x > 1 else 0.0
        if self.slow == "log":
            return (1.0 + lx) ** self.beta
        return math.exp(self.sign * lx ** self.gamma)

    def cost(self, x, k: int):
        """Charge for a query touching x vertices. cost(0) = 0."""
        if x < 0:
            raise PreconditionError("query size must be non-negative")
        if x == 0:
            return 0
        a = self.index(k)
        if self.is_exact(k):
            return int(x) ** int(a)
        return float(x) ** float(a) * self.sigma(x)

    def check_range(self, n: int, k: int) -> None:
        """Assert cost(x) <= x**k, cost > 0 and monotonicity on 1..n."""
        _check_range(self, n, k)


@lru_cache(maxsize=256)
def _check_range(model: CostModel, n: int, k: int) -> None:
    a = model.index(k)
    prev = 0
    for x in range(1, n + 1):
        c = model.cost(x, k)
        if not c > 0:
            raise PreconditionError(f"cost({x}) = {c} is not positive")
        if c > x ** k * (1 + 1e-12):
            raise PreconditionError(f"cost({x}) = {c} exceeds x^k = {x ** k}")
        if a > 0 and c < prev * (1 - 1e-12):
            raise PreconditionError(f"cost is decreasing at x={x}")
        prev = c


UNIT = CostModel(alpha=0)
LINEAR = CostModel(alpha=1)
