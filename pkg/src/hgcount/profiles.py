"""Constant sets for the estimators.

``theory`` uses the constants exactly as the algorithms state them.
``fast`` swaps the large analysis constants for small tuned ones so that
desk-scale experiments finish; it never changes the control flow.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .errors import PreconditionError


@dataclass(frozen=True)
class Profile:
    name: str
    # sampling schedule: None keeps eps^-2 10 k^2 2^k log n
    c_t: Optional[Fraction] = None
    # colourings per SparseCount call: c_cc e^{2k} (ln(|U|+2) if cc_log)
    c_cc: float = 1.0
    cc_log: bool = True
    # SparseCount failure parameter inside UncolApprox; None = n^{-5k}/120
    sparse_delta: Optional[float] = None
    # query cap of SparseCount is c_rte ln(1/delta) t 2^k (log|U|+1) (M+1)
    c_rte: float = 4.0
    # base failure probability fed to median boosting
    delta0: Fraction = Fraction(1, 3)
    # resource-capped retries use this failure target per run
    retry_gamma: Fraction = Fraction(1, 12)
    # colourful side
    large_p_scale: float = 1.0      # multiplies p_out in the LargeCore repetition count
    large_n_max: Optional[int] = None  # cap on VerifyGuess calls per M
    t_exponent: Optional[float] = None  # None = 20k/(alpha - alpha')
    small_delta: Optional[float] = None  # inner fine-count failure in SmallCore; None = 1/(12 n^k)
    fine_b: Optional[float] = None  # coarse factor used by the fine counter; None = the coarse counter's own b
    c_f: float = 1.0
    s0_mult: int = 64
    coarse_boost: bool = True


THEORY = Profile("theory")

FAST = Profile(
    "fast",
    c_t=Fraction(2),
    c_cc=0.125,
    cc_log=False,
    sparse_delta=1e-3,
    delta0=Fraction(1, 4),
    large_p_scale=1.0,
    large_n_max=64,
    t_exponent=0.5,
    small_delta=1e-3,
    fine_b=4.0,
    c_f=0.25,
    coarse_boost=False,
)

PROFILES = {"theory": THEORY, "fast": FAST}


def get_profile(p) -> Profile:
    if isinstance(p, Profile):
        return p
    try:
        return PROFILES[p]
    except KeyError:
        raise PreconditionError(f"unknown profile {p!r}") from None


def tuned(p, **changes) -> Profile:
    return replace(get_profile(p), **changes)
