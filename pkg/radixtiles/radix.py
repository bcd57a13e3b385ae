"""Digit expansion by the Euclidean algorithm and the exact radix-representation decision."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from radixtiles import config, defaults
from radixtiles.digits import DigitSet, digit_for
from radixtiles.errors import InternalError, NotTerminated, ResourceLimit, StepBudgetExceeded
from radixtiles.lattice import IntMatrix, IntVector, as_vector, contraction_power, inverse_power_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Terminated:
    """The expansion reached 0 after ``length`` digits."""

    length: int


@dataclass(frozen=True)
class Cycle:
    """The expansion entered a cycle at ``entry_index`` with the given period."""

    entry_index: int
    period: int
    cycle_states: Tuple[IntVector, ...]


@dataclass(frozen=True)
class RadixExpansion:
    """Digits of x, least significant first, and how the expansion ended."""

    input: IntVector
    digits: Tuple[IntVector, ...]
    status: Union[Terminated, Cycle]

    @property
    def terminated(self) -> bool:
        """True for a finite radix representation."""
        return isinstance(self.status, Terminated)

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        data = {"input": self.input.to_json(), "digits": [d.to_json() for d in self.digits]}
        if self.terminated:
            data["status"] = {"terminated": True, "length": self.status.length}
        else:
            data["status"] = {
                "terminated": False,
                "entry_index": self.status.entry_index,
                "period": self.status.period,
                "cycle_states": [s.to_json() for s in self.status.cycle_states],
            }
        return data


class Witness(NamedTuple):
    """A non-zero cycle of the digit step, rotated to start at its smallest state."""

    start: IntVector
    cycle: Tuple[IntVector, ...]


class AbsorbingBall(NamedTuple):
    """Ball of radius rho containing every eventually periodic state of the digit step."""

    rho: float
    m: int
    K: float
    C: float

    @property
    def radius_squared(self) -> int:
        """Integer bound R with {x in Z^n : |x| <= rho} = {x : sum x_i^2 <= R}."""
        return int(self.rho * self.rho * (1 + 1e-9))


@dataclass
class DecisionReport:
    """Verdict of "A yields a radix representation with digit set D"."""

    yields: bool
    ball_radius: float
    points_checked: int
    witnesses: List[Witness]
    m_contraction: int
    max_length: int = 0
    terminating: int = 0
    cycling: int = 0

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "yields": self.yields,
            "ball_radius": self.ball_radius,
            "points_checked": self.points_checked,
            "m_contraction": self.m_contraction,
            "max_length": self.max_length,
            "terminating": self.terminating,
            "cycling": self.cycling,
            "witnesses": [
                {"start": w.start.to_json(), "cycle": [s.to_json() for s in w.cycle]} for w in self.witnesses
            ],
        }


@dataclass(frozen=True)
class DkSet:
    """Integers with a radix representation of at most k digits."""

    k: int
    members: FrozenSet[IntVector] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return as_vector(x) in self.members


def canonical_cycle(states: Sequence[IntVector]) -> Tuple[IntVector, ...]:
    """Rotate a cycle to start at its lexicographically smallest state."""
    start = min(range(len(states)), key=lambda i: states[i])
    return tuple(states[start:]) + tuple(states[:start])


def expand(x, digit_set: DigitSet, max_steps: Optional[int] = None) -> RadixExpansion:
    """Expand x in base A with digits D until it reaches 0 or revisits a state.

    Raises
    ------
    StepBudgetExceeded
        If neither happens within ``max_steps`` digit steps.

    Examples
    --------
    >>> e = expand(5, validate_digit_set([[2]], [0, 1]))
    >>> [d[0] for d in e.digits]
    [1, 0, 1]
    """
    x = as_vector(x)
    max_steps = max_steps or config.get_max_steps()
    if x.is_zero():
        return RadixExpansion(x, (), Terminated(0))

    states: List[IntVector] = [x]
    seen: Dict[IntVector, int] = {x: 0}
    digits: List[IntVector] = []
    state = x

    for _ in range(max_steps):
        digit, state = digit_for(state, digit_set)
        digits.append(digit)

        if state.is_zero():
            return RadixExpansion(x, tuple(digits), Terminated(len(digits)))

        if state in seen:
            entry = seen[state]
            cycle = Cycle(entry_index=entry, period=len(states) - entry, cycle_states=tuple(states[entry:]))
            return RadixExpansion(x, tuple(digits), cycle)

        seen[state] = len(states)
        states.append(state)

    raise StepBudgetExceeded(x, max_steps)


def reconstruct(expansion: RadixExpansion, matrix: IntMatrix) -> IntVector:
    """Evaluate sum_j A^j d_j by Horner's rule.

    Raises
    ------
    NotTerminated
        If the expansion ended in a cycle.
    """
    if not expansion.terminated:
        raise NotTerminated(f"expansion of {expansion.input} ends in a cycle")

    value = IntVector.zero(matrix.n)
    for digit in reversed(expansion.digits):
        value = (matrix @ value) + digit
    return value


def replay_cycle(states: Sequence[IntVector], digit_set: DigitSet) -> bool:
    """Return True when one digit step maps every state to the next one, cyclically."""
    if not states:
        return False
    for i, state in enumerate(states):
        if state.is_zero():
            return False
        _, successor = digit_for(state, digit_set)
        if successor != states[(i + 1) % len(states)]:
            return False
    return True


def absorbing_ball(digit_set: DigitSet) -> AbsorbingBall:
    """Return the radius rho = 2K + s of a ball that every orbit enters and every cycle lies in.

    m is the least power with |A^-m| <= 1/2, C the largest digit norm, K = C * sum_{i<=m} |A^-i| and
    s = max_{i<=m} |A^-i| * 2K + K.
    """
    matrix = digit_set.matrix
    m = contraction_power(matrix, defaults.MAX_CONTRACTION_POWER)
    norms = [inverse_power_norm(matrix, i) for i in range(1, m + 1)]
    c = digit_set.max_norm
    k = c * sum(norms)
    slack = max(norms) * 2 * k + k
    return AbsorbingBall(rho=2 * k + slack, m=m, K=k, C=c)


@lru_cache(maxsize=65536)
def lattice_point_count(n: int, radius_squared: int) -> int:
    """Exact number of x in Z^n with sum x_i^2 <= radius_squared."""
    if radius_squared < 0:
        return 0
    if n == 0:
        return 1
    if n == 1:
        return 2 * isqrt(radius_squared) + 1
    r = isqrt(radius_squared)
    return sum(lattice_point_count(n - 1, radius_squared - x * x) for x in range(-r, r + 1))


def lattice_points(n: int, radius_squared: int) -> Iterator[IntVector]:
    """Yield the x in Z^n with sum x_i^2 <= radius_squared in lexicographic order."""

    def _points(dim: int, budget: int) -> Iterator[Tuple[int, ...]]:
        if dim == 0:
            yield ()
            return
        r = isqrt(budget)
        for x in range(-r, r + 1):
            for rest in _points(dim - 1, budget - x * x):
                yield (x,) + rest

    if radius_squared >= 0:
        for point in _points(n, radius_squared):
            yield IntVector(point)


class _OrbitClassifier:
    """Memoized outcome of the digit-step orbit of each visited state.

    An outcome is ``(True, length)`` when the orbit reaches 0 after ``length`` digits and
    ``(False, cycle)`` with the canonical cycle otherwise.
    """

    def __init__(self, digit_set: DigitSet, max_steps: int):
        self.digit_set = digit_set
        self.max_steps = max_steps
        self.outcomes: Dict[IntVector, Tuple[bool, object]] = {}

    def classify(self, x: IntVector) -> Tuple[bool, object]:
        path: List[IntVector] = []
        position: Dict[IntVector, int] = {}
        state = x

        while True:
            if state.is_zero():
                outcome = (True, 0)
                break
            if state in self.outcomes:
                outcome = self.outcomes[state]
                break
            if state in position:
                cycle = canonical_cycle(path[position[state] :])
                outcome = (False, cycle)
                break
            if len(path) >= self.max_steps:
                raise StepBudgetExceeded(x, self.max_steps)
            position[state] = len(path)
            path.append(state)
            state = digit_for(state, self.digit_set)[1]

        terminates, detail = outcome
        for offset, visited in enumerate(reversed(path), start=1):
            self.outcomes[visited] = (True, detail + offset) if terminates else outcome
        return self.outcomes.get(x, outcome)


def decide_radix(
    digit_set: DigitSet,
    point_cap: Optional[int] = None,
    max_steps: Optional[int] = None,
    progress: bool = False,
) -> DecisionReport:
    """Decide whether every x in Z^n has a finite radix representation with the given digits.

    Every lattice point of the absorbing ball is expanded. Cycles can only live inside the ball, so the
    answer is exact.

    Raises
    ------
    ResourceLimit
        If the ball holds more lattice points than the configured cap.
    """
    ball = absorbing_ball(digit_set)
    n = digit_set.n
    count = lattice_point_count(n, ball.radius_squared)
    cap = config.get_point_cap(point_cap)
    if count > cap:
        raise ResourceLimit("absorbing ball lattice points", count, cap)
    logger.info(f"decide {digit_set.matrix}: rho={ball.rho:.4g}, m={ball.m}, {count} lattice points")

    classifier = _OrbitClassifier(digit_set, max_steps or config.get_max_steps())
    witnesses: Dict[Tuple[IntVector, ...], Witness] = {}
    max_length = terminating = cycling = 0

    points = lattice_points(n, ball.radius_squared)
    if progress:
        points = tqdm(points, total=count, desc="absorbing ball", leave=False)

    for x in points:
        terminates, detail = classifier.classify(x)
        if terminates:
            terminating += 1
            max_length = max(max_length, detail)
        else:
            cycling += 1
            if detail not in witnesses:
                if not replay_cycle(detail, digit_set):
                    raise InternalError(f"cycle {[str(s) for s in detail]} does not replay")
                witnesses[detail] = Witness(start=detail[0], cycle=detail)

    return DecisionReport(
        yields=not witnesses,
        ball_radius=ball.rho,
        points_checked=count,
        witnesses=sorted(witnesses.values()),
        m_contraction=ball.m,
        max_length=max_length,
        terminating=terminating,
        cycling=cycling,
    )


def representable_range(digit_set: DigitSet, radius: int, max_steps: Optional[int] = None) -> Tuple[int, int]:
    """Count lattice points of norm <= radius whose expansion terminates and cycles, respectively."""
    classifier = _OrbitClassifier(digit_set, max_steps or config.get_max_steps())
    terminating = cycling = 0
    for x in lattice_points(digit_set.n, radius * radius):
        if classifier.classify(x)[0]:
            terminating += 1
        else:
            cycling += 1
    return terminating, cycling


def enumerate_dk_array(digit_set: DigitSet, k: int, cap: Optional[int] = None) -> np.ndarray:
    """Return the q^k points sum_{j<k} A^j d_j as rows of an integer array.

    Rows are ordered with d_0 varying slowest. The array is int64 while the entries provably fit and
    object (Python int) otherwise.

    Raises
    ------
    ResourceLimit
        If q^k exceeds the cap.
    """
    cap = cap or config.get_dk_cap()
    size = digit_set.q**k
    if size > cap:
        raise ResourceLimit(f"D_(A,{k}) points", size, cap)

    n = digit_set.n
    matrix = digit_set.matrix
    digit_bound = max(max(abs(c) for c in d) for d in digit_set)
    row_bound = matrix.max_abs_row_sum()

    bound = 0
    dtype = np.int64
    points = np.zeros((1, n), dtype=dtype)
    digits = np.array(digit_set.digits, dtype=dtype)
    transposed = np.array(matrix.transpose().rows, dtype=dtype)

    for _ in range(k):
        bound = digit_bound + row_bound * bound
        if dtype is np.int64 and bound * max(row_bound, 1) * n >= 2**62:
            dtype = object
            points = points.astype(object)
            digits = digits.astype(object)
            transposed = transposed.astype(object)
        shifted = points @ transposed
        points = (digits[:, None, :] + shifted[None, :, :]).reshape(-1, n)

    return points


def enumerate_Dk(digit_set: DigitSet, k: int, cap: Optional[int] = None) -> DkSet:
    """Return D_(A,k), the q^k integers with a radix representation of at most k digits.

    Raises
    ------
    ResourceLimit
        If q^k exceeds the cap.
    InternalError
        If two digit strings give the same point.
    """
    array = enumerate_dk_array(digit_set, k, cap)
    members = frozenset(IntVector(row) for row in array.tolist())
    if len(members) != len(array):
        raise InternalError(f"D_(A,{k}) has {len(members)} distinct members, expected {len(array)}")
    return DkSet(k=k, members=members)
