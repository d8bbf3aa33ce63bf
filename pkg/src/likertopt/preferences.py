"""Likert outcomes, certainty levels, outcome-set validity rules and the
per-outcome bound/weight computations that feed the surrogate QP.

A preference answer is a set of 1..5 ``(likert, certainty)`` pairs.  Likert
values live in ``{-2,-1,0,1,2}`` (negative: first candidate better),
certainty in ``{1,2,3,4}`` (4 = absolutely sure).  A valid set has
contiguous, sign-consistent likert values, and a certainty-4 answer must be
the only one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BadTolerancesError,
    CertaintyFourNotSingletonError,
    CertaintyOutOfRangeError,
    DuplicateLikertError,
    EmptyOutcomeSetError,
    LikertOutOfRangeError,
    MixedSignsError,
    NotContiguousError,
)

LIKERT_VALUES = (-2, -1, 0, 1, 2)
CERTAINTY_VALUES = (1, 2, 3, 4)


@dataclass(frozen=True)
class Outcome:
    """One ``(likert, certainty)`` answer."""

    p: int
    c: int


@dataclass(frozen=True)
class OutcomeSet:
    """Validated, ascending-likert answer set from one preference query."""

    outcomes: tuple[Outcome, ...]

    @property
    def q(self) -> int:
        return len(self.outcomes)

    @property
    def p_min(self) -> int:
        return self.outcomes[0].p

    @property
    def p_max(self) -> int:
        return self.outcomes[-1].p

    def to_dict(self) -> dict:
        return {"outcomes": [{"p": o.p, "c": o.c} for o in self.outcomes]}


@dataclass(frozen=True)
class PreferenceRecord:
    """A resolved comparison between samples ``i`` and ``j``.

    Negative likert values mean sample ``i`` is preferred.
    """

    i: int
    j: int
    outcome_set: OutcomeSet
    query_id: str = ""

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("a record must compare two distinct samples")


@dataclass(frozen=True)
class BoundSpec:
    """Band template for one likert level: base bounds plus how the slack
    variable enters each side (-1 relaxes a finite lower bound, +1 a finite
    upper bound, 0 marks an infinite side)."""

    lower: float
    upper: float
    slack_sign_lower: int
    slack_sign_upper: int


def validate_outcome_set(raw) -> OutcomeSet:
    """Normalize a list of ``(likert, certainty)`` pairs into an OutcomeSet.

    Check order: range, duplicates, signs, contiguity, certainty-four rule;
    the first violated rule is reported.
    """
    pairs = []
    for item in raw:
        if isinstance(item, Outcome):
            p, c = item.p, item.c
        else:
            p, c = item
        pairs.append((int(p), int(c)))
    if not pairs:
        raise EmptyOutcomeSetError("outcome set is empty")
    for p, c in pairs:
        if p not in LIKERT_VALUES:
            raise LikertOutOfRangeError(f"likert value {p} not in {{-2..2}}")
        if c not in CERTAINTY_VALUES:
            raise CertaintyOutOfRangeError(f"certainty level {c} not in {{1..4}}")
    ps = [p for p, _ in pairs]
    if len(set(ps)) != len(ps):
        raise DuplicateLikertError(f"duplicate likert values in {ps}")
    if any(p > 0 for p in ps) and any(p < 0 for p in ps):
        raise MixedSignsError(f"outcome set {sorted(ps)} mixes signs")
    pairs.sort()
    ps = [p for p, _ in pairs]
    if ps[-1] - ps[0] != len(ps) - 1:
        raise NotContiguousError(f"likert values {ps} are not contiguous")
    if len(pairs) > 1 and any(c == 4 for _, c in pairs):
        raise CertaintyFourNotSingletonError(
            "an absolutely-sure outcome must be the only one"
        )
    return OutcomeSet(tuple(Outcome(p, c) for p, c in pairs))


def outcome_set_from_dict(obj: dict) -> OutcomeSet:
    return validate_outcome_set([(o["p"], o["c"]) for o in obj["outcomes"]])


def bounds_for_level(p: int, sigma1: float, sigma2: float) -> BoundSpec:
    """Band template (before slack) for one likert level.

    Requires ``0 < sigma1 < sigma2``.
    """
    if not (sigma1 > 0 and sigma2 > sigma1):
        raise BadTolerancesError(f"need 0 < sigma1 < sigma2, got {sigma1}, {sigma2}")
    if p not in LIKERT_VALUES:
        raise LikertOutOfRangeError(f"likert value {p} not in {{-2..2}}")
    table = {
        -2: (-math.inf, -sigma2),
        -1: (-sigma2, -sigma1),
        0: (-sigma1, sigma1),
        1: (sigma1, sigma2),
        2: (sigma2, math.inf),
    }
    lower, upper = table[p]
    return BoundSpec(
        lower=lower,
        upper=upper,
        slack_sign_lower=-1 if math.isfinite(lower) else 0,
        slack_sign_upper=+1 if math.isfinite(upper) else 0,
    )


def record_weights(os: OutcomeSet) -> tuple[float, tuple[float, ...]]:
    """Slack penalty weights for one record: ``b`` (sum of certainties, on
    the whole-set slack) and per-outcome weights ``c_t / 4``.

    A single-outcome set gets ``w = (0,)``: its per-outcome band coincides
    with the whole-set band, so the second slack would be redundant.
    """
    b = float(sum(o.c for o in os.outcomes))
    if os.q == 1:
        return b, (0.0,)
    return b, tuple(o.c / 4.0 for o in os.outcomes)
