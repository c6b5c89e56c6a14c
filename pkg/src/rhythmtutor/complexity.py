"""Entropy-based rhythm complexity and curriculum ordering.

A pattern is recoded level by level, from single symbols to larger
elements, until one element spans the whole cycle: each level groups
maximal runs of identical lower-level elements, and when a sequence has
no adjacent duplicates it is grouped into adjacent pairs (composites)
instead, so construction always terminates. Each level k contributes
two uncertainty values:

* ``h_max`` — the maximum uncertainty of an N_k-element sequence,
  ``log2(N_k)``;
* ``h_joint`` — the joint uncertainty actually present, the Shannon
  entropy of the empirical element distribution at that level.

The pattern's complexity ``h_code`` is the sum of both values over all
levels. Patterns beginning with a silence are "off-beat" and get a
constant increment: the highest ``h_code`` among same-length patterns
that begin with an onset, so every off-beat pattern ranks above every
on-beat one of its cycle length.

``CLAVE_SON_H_CODE`` documents the value this reconstruction computes
for the 16-pulse clave son reference pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from collections import Counter
from typing import Any, Hashable, Mapping, Sequence

from .core import RhythmPattern, parse_pattern, render_pattern
from .errors import DomainError, EnumerationTooLargeError

#: h_code of [1 0 0 1 0 0 1 0 0 0 1 0 1 0 0 0] under this reconstruction.
CLAVE_SON_H_CODE = 19.322786564640325

#: Largest cycle length enumerated without an explicit override.
DEFAULT_ENUMERATION_BOUND = 12

_PROB_TOL = 1e-9


def _validate_dist(dist: Mapping[Any, float]) -> None:
    if not dist:
        raise DomainError("empty probability distribution")
    total = 0.0
    for outcome, p in dist.items():
        if not (0.0 <= p <= 1.0 + _PROB_TOL):
            raise DomainError(f"probability out of [0,1] for {outcome!r}: {p}")
        total += p
    if abs(total - 1.0) > 1e-6:
        raise DomainError(f"probabilities sum to {total}, expected 1")


def entropy(dist: Mapping[Any, float]) -> float:
    """Shannon entropy in bits, with 0*log2(0) = 0."""
    _validate_dist(dist)
    return -sum(p * math.log2(p) for p in dist.values() if p > 0.0)


def joint_entropy(joint: Mapping[tuple, float]) -> float:
    """H(X,Y) of a distribution over pairs."""
    _validate_dist(joint)
    return -sum(p * math.log2(p) for p in joint.values() if p > 0.0)


def marginal(joint: Mapping[tuple, float], index: int) -> dict[Any, float]:
    out: dict[Any, float] = {}
    for pair, p in joint.items():
        out[pair[index]] = out.get(pair[index], 0.0) + p
    return out


def conditional_entropy(joint: Mapping[tuple, float]) -> float:
    """H(Y|X) for a joint distribution over (x, y) pairs.

    Defined so the chain rule H(X,Y) = H(X) + H(Y|X) holds exactly.
    """
    return joint_entropy(joint) - entropy(marginal(joint, 0))


# --- code-level construction -------------------------------------------------

def _group_runs(seq: tuple[Hashable, ...]) -> tuple[Hashable, ...]:
    out: list[tuple[Hashable, int]] = []
    cur, count = seq[0], 1
    for e in seq[1:]:
        if e == cur:
            count += 1
        else:
            out.append(("run", cur, count))
            cur, count = e, 1
    out.append(("run", cur, count))
    return tuple(out)


def _group_pairs(seq: tuple[Hashable, ...]) -> tuple[Hashable, ...]:
    out = [("pair",) + tuple(seq[i : i + 2]) for i in range(0, len(seq) - 1, 2)]
    if len(seq) % 2:
        out.append(("pair", seq[-1]))
    return tuple(out)


def _element_width(element: Hashable) -> int:
    """Number of level-1 symbols an element spans."""
    if isinstance(element, tuple):
        if element and element[0] == "run":
            return _element_width(element[1]) * element[2]
        if element and element[0] == "pair":
            return sum(_element_width(e) for e in element[1:])
    return 1


def element_text(element: Hashable) -> str:
    """Flatten an element back to the symbol substring it spans."""
    if isinstance(element, tuple):
        if element and element[0] == "run":
            return element_text(element[1]) * element[2]
        if element and element[0] == "pair":
            return "".join(element_text(e) for e in element[1:])
    return str(element)


@dataclass(frozen=True)
class CodeLevelReport:
    """Uncertainty of one code level."""

    level: int
    elements: tuple[str, ...]
    h_max: float
    h_joint: float

    def __post_init__(self):
        if self.h_joint > self.h_max + _PROB_TOL:
            raise DomainError(
                f"level {self.level}: h_joint {self.h_joint} exceeds h_max {self.h_max}"
            )


def _level_entropy(seq: tuple[Hashable, ...]) -> float:
    counts = Counter(seq)
    n = len(seq)
    return -sum((c / n) * math.log2(c / n) for c in counts.values()) + 0.0


def build_code_levels(pattern: RhythmPattern) -> list[CodeLevelReport]:
    """Recode the pattern level by level and report h_max/h_joint per level."""
    seq: tuple[Hashable, ...] = tuple(pattern.symbols)
    reports: list[CodeLevelReport] = []
    level = 1
    while True:
        reports.append(
            CodeLevelReport(
                level=level,
                elements=tuple(element_text(e) for e in seq),
                h_max=math.log2(len(seq)),
                h_joint=_level_entropy(seq),
            )
        )
        if len(seq) == 1:
            break
        grouped = _group_runs(seq)
        if len(grouped) >= len(seq):
            grouped = _group_pairs(seq)
        seq = grouped
        level += 1
    return reports


def h_code(pattern: RhythmPattern) -> float:
    """Total complexity: sum of h_max + h_joint over all code levels."""
    return sum(r.h_max + r.h_joint for r in build_code_levels(pattern))


@dataclass(frozen=True)
class ComplexityScore:
    pattern: RhythmPattern
    h_code: float
    off_beat_adjusted: bool
    adjusted_value: float
    levels: tuple[CodeLevelReport, ...]


def _all_patterns(cycle_len: int, first_symbol: int | None = None):
    head = (first_symbol,) if first_symbol is not None else ()
    tail_len = cycle_len - len(head)
    for tail in product((0, 1), repeat=tail_len):
        symbols = head + tail
        if any(symbols):
            yield RhythmPattern(symbols)


@lru_cache(maxsize=None)
def offbeat_increment(cycle_len: int) -> float:
    """Highest h_code among on-beat (1-initial) patterns of this length."""
    if cycle_len < 2:
        raise DomainError("cycle length must be at least 2")
    return max(h_code(p) for p in _all_patterns(cycle_len, first_symbol=1))


def adjusted_complexity(pattern: RhythmPattern, cycle_len: int | None = None) -> ComplexityScore:
    """h_code plus the off-beat increment for 0-initial patterns."""
    if cycle_len is not None and cycle_len != pattern.cycle_len:
        raise DomainError(
            f"cycle_len {cycle_len} does not match pattern length {pattern.cycle_len}"
        )
    levels = tuple(build_code_levels(pattern))
    base = sum(r.h_max + r.h_joint for r in levels)
    if pattern.starts_on_beat:
        return ComplexityScore(pattern, base, False, base, levels)
    adjusted = base + offbeat_increment(pattern.cycle_len)
    return ComplexityScore(pattern, base, True, adjusted, levels)


def enumerate_curriculum(
    cycle_len: int,
    allow_large: bool = False,
    enumeration_bound: int = DEFAULT_ENUMERATION_BOUND,
) -> list[ComplexityScore]:
    """All 2^n - 1 non-silent patterns, ascending by adjusted complexity.

    Ties break by onset count, then lexicographic pattern string.
    """
    if cycle_len < 2:
        raise DomainError("cycle length must be at least 2")
    if cycle_len > enumeration_bound and not allow_large:
        raise EnumerationTooLargeError(
            f"cycle length {cycle_len} enumerates {2 ** cycle_len - 1} patterns; "
            f"bound is {enumeration_bound} (pass allow_large to override)"
        )
    scores = [adjusted_complexity(p) for p in _all_patterns(cycle_len)]
    scores.sort(
        key=lambda s: (s.adjusted_value, s.pattern.onset_count, render_pattern(s.pattern))
    )
    return scores


def clave_son() -> RhythmPattern:
    """The 16-pulse Afro-Cuban reference rhythm."""
    return parse_pattern("1001001000101000")
