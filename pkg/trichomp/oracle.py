"""
Brute-force retrograde solver for three-row Chomp.

Used as ground truth for the recurrence engines: it knows nothing about f(q, r) and classifies
positions directly from the definition of P- and N-positions.
"""

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Iterator, List, Tuple

import numpy as np

from trichomp.config import DEFAULT_MEMORY_CEILING, UsageError, check_memory
from trichomp.game import Move, Position3, moves

logger = logging.getLogger(__name__)

# outcome array plus resolution flags
_BYTES_PER_STATE = 2


class Outcome(Enum):
    """P: the player to move loses under perfect play. N: the player to move wins."""

    P = "P"
    N = "N"

    def __str__(self):
        return self.value


class EvaluationOrderError(RuntimeError):
    """A position was evaluated before one of its options."""


def position_index(p, q, r):
    """Index of [p, q, r] in the lexicographic enumeration of positions with p >= 1.

    Works elementwise on numpy arrays.
    """
    return p * (p + 1) * (p + 2) // 6 - 1 + q * (q + 1) // 2 + r


def domain_size(bound):
    """Number of positions with first row at most `bound`."""
    return position_index(bound + 1, 0, 0)


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """
    Outcome of every position [p, q, r] with p <= bound.

    Args:
        bound: largest first-row length covered
        is_p: boolean array indexed by `position_index`
    """

    bound: int
    is_p: np.ndarray

    def __len__(self):
        return len(self.is_p)

    def __contains__(self, pos):
        return pos.p <= self.bound

    def __getitem__(self, pos: Position3) -> Outcome:
        if pos not in self:
            raise UsageError(f"{pos} lies outside the oracle domain p <= {self.bound}")
        return Outcome.P if self.is_p[position_index(pos.p, pos.q, pos.r)] else Outcome.N

    def positions(self) -> Iterator[Position3]:
        """All positions of the domain in index order."""
        for p in range(1, self.bound + 1):
            for q in range(p + 1):
                for r in range(q + 1):
                    yield Position3(p, q, r)

    def items(self) -> Iterator[Tuple[Position3, Outcome]]:
        for pos in self.positions():
            yield pos, self[pos]


def _option_indices(p, q, r):
    """Indices of the options of [p, q, r], one per legal move."""
    cut1 = np.arange(1, p)
    cut2 = np.arange(q)
    cut3 = np.arange(r)
    return np.concatenate(
        [
            position_index(cut1, np.minimum(q, cut1), np.minimum(r, cut1)),
            position_index(p, cut2, np.minimum(r, cut2)),
            position_index(p, q, cut3),
        ]
    )


def solve(bound, memory_ceiling=DEFAULT_MEMORY_CEILING) -> OutcomeTable:
    """Classify every position with first row at most `bound`.

    Positions are visited in lexicographic order of (p, q, r): every move shortens one row and
    never lengthens another, so all options come earlier. This is asserted for every position.

    Args:
        bound: largest first-row length, at least 1
        memory_ceiling: maximum size of the outcome table in bytes

    Returns:
        An OutcomeTable covering all positions with p <= bound
    """
    if bound < 1:
        raise UsageError(f"oracle bound must be positive (got {bound})")
    size = domain_size(bound)
    check_memory(size * _BYTES_PER_STATE, memory_ceiling, f"oracle table for bound {bound}")
    logger.info("Solving %d positions with p <= %d", size, bound)

    is_p = np.zeros(size, dtype=bool)
    resolved = np.zeros(size, dtype=bool)
    index = 0
    for p in range(1, bound + 1):
        for q in range(p + 1):
            for r in range(q + 1):
                opts = _option_indices(p, q, r)
                if not resolved[opts].all():
                    raise EvaluationOrderError(f"option of [{p},{q},{r}] evaluated too late")
                # no options at all also gives P
                is_p[index] = not is_p[opts].any()
                resolved[index] = True
                index += 1

    table = OutcomeTable(bound=bound, is_p=is_p)
    table.is_p.setflags(write=False)
    logger.info("Oracle done: %d P-positions", int(is_p.sum()))
    return table


def winning_moves_bruteforce(pos: Position3, table: OutcomeTable) -> List[Move]:
    """Moves of `pos` leading to a P-position according to the oracle."""
    if pos not in table:
        raise UsageError(f"{pos} lies outside the oracle domain p <= {table.bound}")
    return [move for move in moves(pos) if table[move.result] is Outcome.P]
