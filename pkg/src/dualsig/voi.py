"""Exact value of information on finite discrete problems.

The value of a signal set is the drop in optimal Bayes risk relative to the
best constant decision.  For quadratic loss it equals the expected variance
reduction; for binary log loss (base 2 throughout this module) it equals the
mutual information between state and signals.  :func:`brute_force_voi`
recomputes every value by direct minimization over decision rules — grid
search plus ternary refinement for the continuous losses, full rule
enumeration for finite decision sets — and is the independent oracle for the
closed-form paths.

Two binary constructions make the ratio of conditional to standalone value
``v(a|h) / v(a)`` take any target in [0, inf):

* XOR: ``a = y XOR u XOR v`` with ``h = v``; knowing ``h`` strips one noise
  layer, so the conditional value exceeds the standalone one (ratio >= 1).
* Erasure: ``a = y XOR u`` and ``h`` equals ``a`` except it is erased (the
  null symbol) with probability ``t``; then the ratio is exactly ``t`` < 1.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._search import bisect, minimize_grid_refine
from .core import ValidationError

__all__ = [
    "NULL_SIGNAL",
    "QuadraticLoss",
    "LogLoss",
    "TableLoss",
    "DiscreteProblem",
    "VoiReport",
    "binary_entropy",
    "bayes_risk",
    "value_of_information",
    "marginal_value_discrete",
    "xor_construction",
    "erasure_construction",
    "xor_q_for_ratio",
    "ratio_construction",
    "posterior_two_tests",
    "brute_force_voi",
    "problem_to_table",
    "problem_from_table",
]

NULL_SIGNAL = "null"

_LOG2 = math.log(2.0)


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) in bits; 0 at p in {0, 1}, 1 at p = 1/2."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"binary_entropy needs p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@dataclass(frozen=True)
class QuadraticLoss:
    """Squared error; states must be real, decisions range over the reals."""


@dataclass(frozen=True)
class LogLoss:
    """Binary log loss in bits; states must be 0/1, decisions lie in (0, 1)."""


@dataclass(frozen=True)
class TableLoss:
    """Finite decision set with an explicit loss function table."""

    decisions: tuple
    loss: Callable[[object, object], float]


Loss = QuadraticLoss | LogLoss | TableLoss


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    """Finite joint distribution over (state, signal tuple) plus a loss.

    ``probs[i, j1, ..., jK]`` is the probability of state ``states[i]``
    jointly with signal values ``alphabets[k][jk]``.
    """

    states: tuple
    signal_names: tuple[str, ...]
    alphabets: tuple[tuple, ...]
    probs: np.ndarray
    loss: Loss

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        shape = (len(self.states),) + tuple(len(ab) for ab in self.alphabets)
        if len(self.signal_names) != len(self.alphabets):
            raise ValidationError("one alphabet per signal name required")
        if len(set(self.signal_names)) != len(self.signal_names):
            raise ValidationError("signal names must be distinct")
        if probs.shape != shape:
            raise ValidationError(f"probs shape {probs.shape} != expected {shape}")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must be finite and nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"joint probabilities sum to {total}, not 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "signal_names", tuple(self.signal_names))
        object.__setattr__(self, "alphabets", tuple(tuple(ab) for ab in self.alphabets))
        if isinstance(self.loss, (QuadraticLoss, LogLoss)):
            values = self._numeric_states()
            if isinstance(self.loss, LogLoss) and set(values) - {0.0, 1.0}:
                raise ValidationError("log loss requires states in {0, 1}")

    def _numeric_states(self) -> tuple[float, ...]:
        try:
            return tuple(float(s) for s in self.states)
        except (TypeError, ValueError) as exc:
            raise ValidationError("this loss requires numeric states") from exc

    def signal_axes(self, signals: Sequence[str]) -> tuple[int, ...]:
        try:
            return tuple(self.signal_names.index(s) + 1 for s in signals)
        except ValueError as exc:
            raise ValidationError(
                f"unknown signal in {signals!r}; have {self.signal_names}") from exc


@dataclass(frozen=True)
class VoiReport:
    """Values of each signal set plus the conditional value of the second."""

    l0: float
    v_h: float
    v_a: float
    v_joint: float
    v_a_given_h: float
    ratio: float

    def __post_init__(self) -> None:
        tol = 1e-9
        for name in ("v_h", "v_a", "v_joint", "v_a_given_h"):
            if getattr(self, name) < -tol:
                raise ValidationError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.v_joint < max(self.v_h, self.v_a) - tol:
            raise ValidationError("v_joint must dominate each single-signal value")
        if abs(self.v_a_given_h - (self.v_joint - self.v_h)) > tol:
            raise ValidationError("v_a_given_h must equal v_joint - v_h")


def _optimal_conditional_loss(problem: DiscreteProblem, cond: np.ndarray) -> float:
    """Minimal expected loss against a conditional state distribution."""
    loss = problem.loss
    if isinstance(loss, QuadraticLoss):
        y = np.asarray(problem._numeric_states())
        mean = float(np.dot(cond, y))
        return float(np.dot(cond, y * y)) - mean * mean
    if isinstance(loss, LogLoss):
        y = np.asarray(problem._numeric_states())
        return binary_entropy(float(np.dot(cond, y)))
    best = math.inf
    for d in loss.decisions:
        value = sum(p * loss.loss(s, d) for p, s in zip(cond, problem.states) if p > 0.0)
        if value < best:
            best = value
    return best


def _conditionals(problem: DiscreteProblem, signals: Sequence[str]):
    """Yield (probability, conditional state distribution) per realization."""
    axes = problem.signal_axes(signals)
    drop = tuple(ax for ax in range(1, problem.probs.ndim) if ax not in axes)
    marg = problem.probs.sum(axis=drop) if drop else problem.probs
    flat = marg.reshape(len(problem.states), -1)
    for j in range(flat.shape[1]):
        col = flat[:, j]
        p = float(col.sum())
        if p > 0.0:
            yield p, col / p


def bayes_risk(problem: DiscreteProblem, signals: Sequence[str] = ()) -> float:
    """Optimal expected loss when deciding from the given signals.

    The empty signal set gives the no-information baseline risk.
    """
    return float(sum(p * _optimal_conditional_loss(problem, cond)
                     for p, cond in _conditionals(problem, signals)))


def value_of_information(problem: DiscreteProblem, signals: Sequence[str]) -> float:
    """Risk reduction of the signal set relative to the best constant decision."""
    return bayes_risk(problem, ()) - bayes_risk(problem, signals)


def _report_from_risks(l0: float, r_h: float, r_a: float, r_joint: float) -> VoiReport:
    v_h = l0 - r_h
    v_a = l0 - r_a
    v_joint = l0 - r_joint
    v_a_given_h = v_joint - v_h
    ratio = v_a_given_h / v_a if v_a > 0.0 else math.nan
    return VoiReport(l0=l0, v_h=v_h, v_a=v_a, v_joint=v_joint,
                     v_a_given_h=v_a_given_h, ratio=ratio)


def marginal_value_discrete(problem: DiscreteProblem) -> VoiReport:
    """Full value report for a problem with exactly two signals (own, assistant)."""
    if len(problem.signal_names) != 2:
        raise ValidationError(
            f"need exactly two signals, got {problem.signal_names}")
    h, a = problem.signal_names
    return _report_from_risks(
        bayes_risk(problem, ()),
        bayes_risk(problem, (h,)),
        bayes_risk(problem, (a,)),
        bayes_risk(problem, (h, a)),
    )


def xor_construction(p: float, q: float) -> DiscreteProblem:
    """Binary problem whose conditional/standalone value ratio is >= 1.

    ``y ~ Bernoulli(1/2)``, ``a = y XOR u XOR v`` with independent noise bits
    ``u ~ Bernoulli(p)``, ``v ~ Bernoulli(q)``, and ``h = v``.  Under log
    loss the ratio equals ``(1 - H2(p)) / (1 - H2(p + q - 2pq))``.
    """
    if not 0.0 < p < 0.5:
        raise ValidationError(f"p must lie in (0, 1/2), got {p}")
    if not 0.0 <= q < 0.5:
        raise ValidationError(f"q must lie in [0, 1/2), got {q}")
    probs = np.zeros((2, 2, 2))
    for y, v, a in itertools.product((0, 1), repeat=3):
        u = a ^ y ^ v
        probs[y, v, a] = 0.5 * (q if v else 1.0 - q) * (p if u else 1.0 - p)
    return DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                           alphabets=((0, 1), (0, 1)), probs=probs, loss=LogLoss())


def erasure_construction(p: float, t: float) -> DiscreteProblem:
    """Binary problem whose conditional/standalone value ratio is exactly t.

    ``a = y XOR u`` with ``u ~ Bernoulli(p)``; the own signal repeats ``a``
    but is erased to the null symbol with probability ``t``.
    """
    if not 0.0 < p < 0.5:
        raise ValidationError(f"p must lie in (0, 1/2), got {p}")
    if not 0.0 <= t < 1.0:
        raise ValidationError(f"t must lie in [0, 1), got {t}")
    h_alphabet = (0, 1, NULL_SIGNAL)
    probs = np.zeros((2, 3, 2))
    for y, a in itertools.product((0, 1), repeat=2):
        u = a ^ y
        p_ya = 0.5 * (p if u else 1.0 - p)
        probs[y, a, a] = p_ya * (1.0 - t)
        probs[y, 2, a] = p_ya * t
    return DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                           alphabets=(h_alphabet, (0, 1)), probs=probs, loss=LogLoss())


def xor_ratio(p: float, q: float) -> float:
    """Closed-form value ratio of :func:`xor_construction`."""
    denominator = 1.0 - binary_entropy(p + q - 2.0 * p * q)
    if denominator == 0.0:
        return math.inf
    return (1.0 - binary_entropy(p)) / denominator


def xor_q_for_ratio(t: float, p: float = 0.1) -> float:
    """Solve the XOR noise level q such that the value ratio equals t >= 1."""
    if t < 1.0:
        raise ValidationError(f"XOR ratios start at 1, got target {t}")
    if t == 1.0:
        return 0.0
    hi = 0.5 - 1e-5  # close enough to 1/2 for ratios beyond 1e9
    if xor_ratio(p, hi) < t:
        raise ValidationError(f"ratio target {t} out of solvable range")
    return bisect(lambda q: xor_ratio(p, q) - t, 0.0, hi, tol=0.0)


def ratio_construction(t: float, p: float = 0.1) -> DiscreteProblem:
    """A problem whose conditional/standalone value ratio equals ``t``.

    Erasure for targets below 1, XOR (with the noise level solved by
    bisection) for targets of 1 and above.
    """
    if t < 0.0:
        raise ValidationError(f"ratio target must be nonnegative, got {t}")
    if t < 1.0:
        return erasure_construction(p, t)
    return xor_construction(p, xor_q_for_ratio(t, p))


def posterior_two_tests(prior: float, tpr: float, fpr: float) -> tuple[float, float]:
    """Posterior of a binary condition after one and after two positive flags.

    The two flags are conditionally independent with the same true/false
    positive rates; returns ``(P(cond | one +), P(cond | both +))``.
    """
    for name, v in (("prior", prior), ("tpr", tpr), ("fpr", fpr)):
        if not 0.0 < v < 1.0:
            raise ValidationError(f"{name} must lie in (0, 1), got {v}")
    single = prior * tpr / (prior * tpr + (1.0 - prior) * fpr)
    both = prior * tpr ** 2 / (prior * tpr ** 2 + (1.0 - prior) * fpr ** 2)
    return single, both


_GRID_RESOLUTION = 1e-4
_GUARD = 10_000_000


def _brute_conditional_loss(problem: DiscreteProblem, cond: np.ndarray) -> float:
    """Numerically minimized expected loss for one realization (no closed forms)."""
    loss = problem.loss
    if isinstance(loss, QuadraticLoss):
        y = problem._numeric_states()
        lo, hi = min(y), max(y)
        if lo == hi:
            return float(sum(p * (s - lo) ** 2 for p, s in zip(cond, y)))
        f = lambda d: float(sum(p * (s - d) ** 2 for p, s in zip(cond, y)))
        return minimize_grid_refine(f, lo, hi, resolution=_GRID_RESOLUTION)[1]
    if isinstance(loss, LogLoss):
        y = problem._numeric_states()
        p1 = float(sum(p for p, s in zip(cond, y) if s == 1.0))
        f = lambda d: -(p1 * math.log2(d) + (1.0 - p1) * math.log2(1.0 - d))
        return minimize_grid_refine(f, 1e-12, 1.0 - 1e-12, resolution=_GRID_RESOLUTION)[1]
    raise AssertionError("table losses are enumerated at the rule level")


def _brute_risk(problem: DiscreteProblem, signals: Sequence[str]) -> float:
    realizations = list(_conditionals(problem, signals))
    loss = problem.loss
    if isinstance(loss, TableLoss):
        n_rules = len(loss.decisions) ** len(realizations)
        if len(realizations) * len(loss.decisions) > _GUARD:
            raise ValidationError("brute-force enumeration guard exceeded")
        if n_rules <= 2_000_000:
            # Enumerate whole decision rules, the most literal reading of the
            # infimum; exchanging min and sum is then *observed*, not assumed.
            best = math.inf
            per_real = [
                [sum(p_s * loss.loss(s, d) for p_s, s in zip(cond, problem.states))
                 for d in loss.decisions]
                for _, cond in realizations
            ]
            weights = [p for p, _ in realizations]
            for rule in itertools.product(range(len(loss.decisions)),
                                          repeat=len(realizations)):
                value = sum(w * per_real[i][di] for i, (w, di) in enumerate(zip(weights, rule)))
                if value < best:
                    best = value
            return best
        return float(sum(p * min(
            sum(p_s * loss.loss(s, d) for p_s, s in zip(cond, problem.states))
            for d in loss.decisions) for p, cond in realizations))
    if len(realizations) * int(1.0 / _GRID_RESOLUTION) > _GUARD:
        raise ValidationError("brute-force enumeration guard exceeded")
    return float(sum(p * _brute_conditional_loss(problem, cond)
                     for p, cond in realizations))


def brute_force_voi(problem: DiscreteProblem) -> VoiReport:
    """Value report computed by direct rule-space minimization.

    Independent oracle for :func:`marginal_value_discrete`: no conditional
    means, entropies, or other closed forms are used on this path.
    """
    if len(problem.signal_names) != 2:
        raise ValidationError(
            f"need exactly two signals, got {problem.signal_names}")
    h, a = problem.signal_names
    return _report_from_risks(
        _brute_risk(problem, ()),
        _brute_risk(problem, (h,)),
        _brute_risk(problem, (a,)),
        _brute_risk(problem, (h, a)),
    )


def _format_symbol(symbol) -> str:
    return repr(symbol) if isinstance(symbol, float) else str(symbol)


def _parse_symbol(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def problem_to_table(problem: DiscreteProblem) -> str:
    """Serialize the joint table: one (state, signal tuple, probability) row."""
    out = io.StringIO()
    out.write("state," + ",".join(problem.signal_names) + ",prob\n")
    for index in np.ndindex(problem.probs.shape):
        symbols = [problem.states[index[0]]]
        symbols += [ab[j] for ab, j in zip(problem.alphabets, index[1:])]
        out.write(",".join(_format_symbol(s) for s in symbols))
        out.write(f",{float(problem.probs[index])!r}\n")
    return out.getvalue()


def problem_from_table(text: str, loss: Loss) -> DiscreteProblem:
    """Rebuild a problem from :func:`problem_to_table` output plus a loss.

    States and alphabet symbols come back as ints, floats, or strings,
    ordered by first appearance (which preserves the original order).
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty problem table")
    header = lines[0].split(",")
    if header[0] != "state" or header[-1] != "prob" or len(header) < 3:
        raise ValidationError(f"malformed header {lines[0]!r}")
    signal_names = tuple(header[1:-1])
    states: list = []
    alphabets: list[list] = [[] for _ in signal_names]
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ValidationError(f"malformed row {ln!r}")
        state = _parse_symbol(parts[0])
        symbols = [_parse_symbol(tok) for tok in parts[1:-1]]
        prob = float(parts[-1])
        if state not in states:
            states.append(state)
        for ab, sym in zip(alphabets, symbols):
            if sym not in ab:
                ab.append(sym)
        rows.append((state, symbols, prob))
    probs = np.zeros((len(states),) + tuple(len(ab) for ab in alphabets))
    for state, symbols, prob in rows:
        index = (states.index(state),) + tuple(
            ab.index(sym) for ab, sym in zip(alphabets, symbols))
        probs[index] = prob
    return DiscreteProblem(states=tuple(states), signal_names=signal_names,
                           alphabets=tuple(tuple(ab) for ab in alphabets),
                           probs=probs, loss=loss)
