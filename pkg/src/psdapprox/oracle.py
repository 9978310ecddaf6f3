"""Independent exact engines certifying the closed forms and bounds.

Nothing here shares code with the closed-form moment functions or bound
formulas it is used to check: run-statistic laws come from a failure-function
automaton driven by a forward dynamic program, cross-checked against direct
enumeration of the trial space, and conditional shift-regularity values come
from grouping the full joint law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import EnumerationLimitError
from .families import PMFTable
from .sequences import DependentSequence, MomentSet, compute_moments

MAX_BRUTE_TRIALS = 24


def failure_function(pattern: Sequence[int]) -> list:
    """KMP border table: ``pi[i]`` is the longest proper border of ``pattern[:i+1]``."""
    pi = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k > 0 and pattern[i] != pattern[k]:
            k = pi[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        pi[i] = k
    return pi


@dataclass(frozen=True)
class RunAutomaton:
    """Deterministic counter of pattern occurrences in a 0/1 trial stream.

    States are match-prefix lengths ``0..L-1``; each (state, symbol) pair has
    exactly one transition and an increment flag.  After a full match the
    state falls back along the border table, so overlapping occurrences are
    counted (patterns that cannot overlap are unaffected).
    """

    pattern: tuple
    transitions: tuple  # transitions[state][symbol] = (next_state, increment)

    @classmethod
    def from_pattern(cls, pattern: Sequence[int]) -> "RunAutomaton":
        pattern = tuple(int(b) for b in pattern)
        if not pattern or any(b not in (0, 1) for b in pattern):
            raise ValueError("pattern must be a non-empty 0/1 sequence")
        L = len(pattern)
        pi = failure_function(pattern)
        table = []
        for state in range(L):
            row = []
            for sym in (0, 1):
                k = state
                while k > 0 and pattern[k] != sym:
                    k = pi[k - 1]
                if pattern[k] == sym:
                    k += 1
                if k == L:
                    row.append((pi[L - 1], 1))
                else:
                    row.append((k, 0))
            table.append(tuple(row))
        return cls(pattern, tuple(table))

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def count(self, trials: Sequence[int]) -> int:
        state = 0
        c = 0
        for sym in trials:
            state, inc = self.transitions[state][sym]
            c += inc
        return c


def two_runs_automaton() -> RunAutomaton:
    return RunAutomaton.from_pattern((1, 1))


def k1k2_automaton(k1: int, k2: int) -> RunAutomaton:
    return RunAutomaton.from_pattern((0,) * k1 + (1,) * k2)


def direct_pattern_count(pattern: Sequence[int], trials: Sequence[int]) -> int:
    """Naive occurrence count (overlaps allowed), for automaton validation."""
    pattern = tuple(pattern)
    L = len(pattern)
    return sum(
        1
        for j in range(len(trials) - L + 1)
        if tuple(trials[j : j + L]) == pattern
    )


def dp_distribution(
    automaton: RunAutomaton,
    trial_probs: Sequence,
    exact: bool = False,
) -> PMFTable:
    """Exact law of the automaton count, by forward DP over (state, count).

    Float mode accumulates in float64; exact mode uses rational arithmetic
    throughout and returns a table of ``Fraction`` masses.
    """
    T = len(trial_probs)
    S = automaton.n_states
    c_max = T  # counts cannot exceed the number of trials
    if exact:
        probs = [p if isinstance(p, Fraction) else Fraction(p) for p in trial_probs]
        zero, one = Fraction(0), Fraction(1)
        layer = [[zero] * (c_max + 1) for _ in range(S)]
        layer[0][0] = one
        for p in probs:
            nxt = [[zero] * (c_max + 1) for _ in range(S)]
            for s in range(S):
                row = layer[s]
                (s0, i0), (s1, i1) = automaton.transitions[s]
                q = one - p
                for c in range(c_max + 1):
                    m = row[c]
                    if m == 0:
                        continue
                    if q != 0:
                        nxt[s0][c + i0] += m * q
                    if p != 0:
                        nxt[s1][c + i1] += m * p
            layer = nxt
        masses = [sum(layer[s][c] for s in range(S)) for c in range(c_max + 1)]
    else:
        layer = np.zeros((S, c_max + 2), dtype=float)
        layer[0, 0] = 1.0
        for p in trial_probs:
            p = float(p)
            nxt = np.zeros_like(layer)
            for s in range(S):
                (s0, i0), (s1, i1) = automaton.transitions[s]
                nxt[s0, i0 : i0 + c_max + 1] += layer[s, : c_max + 1] * (1.0 - p)
                nxt[s1, i1 : i1 + c_max + 1] += layer[s, : c_max + 1] * p
            layer = nxt
        masses = layer.sum(axis=0)[: c_max + 1]
    # Trim trailing zero counts but keep at least the point mass at 0.
    last = c_max
    while last > 0 and masses[last] == 0:
        last -= 1
    return PMFTable(0, tuple(masses[: last + 1]), 0.0)


def brute_force_distribution(
    seq: DependentSequence,
    exact: bool = False,
    exact_probs: Optional[Sequence[Fraction]] = None,
) -> PMFTable:
    """Law of the total sum by full enumeration of the trial space.

    The statistic is re-derived from the sequence's own trials->X mapping, so
    the result is independent of the automaton route.
    """
    if seq.trial_count > MAX_BRUTE_TRIALS:
        raise EnumerationLimitError(
            f"{seq.trial_count} trials exceed the brute-force cutoff"
        )
    if exact:
        acc: dict = {}
        for _, prob, xs in seq.iter_exact(exact_probs):
            w = sum(xs)
            acc[w] = acc.get(w, Fraction(0)) + prob
        top = max(acc)
        masses = tuple(acc.get(w, Fraction(0)) for w in range(top + 1))
        return PMFTable(0, masses, 0.0)
    xs = seq.x_values()
    w = seq.outcome_probs()
    total = xs.sum(axis=1).astype(np.int64)
    masses = np.bincount(total, weights=w)
    return PMFTable(0, tuple(float(m) for m in masses), 0.0)


def _d_of_masses(masses: np.ndarray) -> float:
    """``sum_k |q_k - q_{k-1}|`` of a mass vector (zero-padded both sides)."""
    padded = np.concatenate(([0.0], masses, [0.0]))
    return float(np.abs(np.diff(padded)).sum())


def exact_conditional_D(seq: DependentSequence, i: int, conditioning: str) -> dict:
    """Exact shift-regularity of the conditional law of the total sum.

    For every attainable value of the conditioning statistic, returns
    ``D = 2 d_TV(L(W | value), L(W | value) + 1)``.  Conditioning choices:
    ``"n2"`` on the radius-2 window sum, ``"n1n2"`` on the (radius-1,
    radius-2) pair, ``"even"``/``"odd"`` on the tuple of even- or odd-indexed
    summands.
    """
    xs = seq.x_values()
    w = seq.outcome_probs()
    total = xs.sum(axis=1).astype(np.int64)

    if conditioning == "n2":
        keys = [seq._window_values(xs, i, 2).astype(np.int64)]
    elif conditioning == "n1n2":
        keys = [
            seq._window_values(xs, i, 1).astype(np.int64),
            seq._window_values(xs, i, 2).astype(np.int64),
        ]
    elif conditioning in ("even", "odd"):
        start = 1 if conditioning == "even" else 0
        keys = [xs[:, j].astype(np.int64) for j in range(start, seq.n, 2)]
    else:
        raise ValueError(f"unknown conditioning {conditioning!r}")

    # Pack the conditioning tuple and W into a single integer key.
    packed = np.zeros_like(total)
    radices = []
    for col in keys:
        r = int(col.max()) + 1
        radices.append(r)
        packed = packed * r + col
    w_radix = int(total.max()) + 1
    joint = np.bincount(packed * w_radix + total, weights=w,
                        minlength=int(packed.max() + 1) * w_radix)
    joint = joint.reshape(-1, w_radix)

    out = {}
    group_mass = joint.sum(axis=1)
    for g in np.nonzero(group_mass > 0)[0]:
        cond = joint[g] / group_mass[g]
        value = []
        rem = int(g)
        for r in reversed(radices):
            value.append(rem % r)
            rem //= r
        value = tuple(reversed(value))
        key = value[0] if len(value) == 1 else value
        out[key] = _d_of_masses(cond)
    return out


def moment_oracle(seq: DependentSequence) -> MomentSet:
    """Ground-truth moments by direct expectation over the joint law."""
    return compute_moments(seq, method="enumerate")
