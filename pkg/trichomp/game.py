"""
Three-row Chomp positions and moves.

A position is written [p, q, r] with the row lengths in nonincreasing order. The poisoned square
is the first square of the first row; the move taking it is never generated, so [1, 0, 0] is the
only position without moves and it is lost for the player to move.
"""

from dataclasses import dataclass
import operator
import re
from typing import List, Set

_LITERAL = re.compile(r"(\d+),(\d+),(\d+)", re.ASCII)


class InvalidPositionError(ValueError):
    """Row lengths that do not describe a three-row Chomp position."""


@dataclass(frozen=True, order=True)
class Position3:
    """
    A three-row Chomp position.

    Args:
        p: length of the first row (contains the poisoned square)
        q: length of the second row
        r: length of the third row
    """

    p: int
    q: int
    r: int

    def __post_init__(self):
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if isinstance(value, bool):
                raise InvalidPositionError(f"{name} must be an integer (got {value!r})")
            try:
                # numpy integers are accepted and stored as plain ints
                object.__setattr__(self, name, operator.index(value))
            except TypeError:
                raise InvalidPositionError(f"{name} must be an integer (got {value!r})") from None
        if not self.p >= self.q >= self.r >= 0:
            raise InvalidPositionError(
                f"rows must be nonincreasing and nonnegative (got {self.p},{self.q},{self.r})"
            )
        if self.p < 1:
            raise InvalidPositionError("the first row always keeps the poisoned square")

    @classmethod
    def parse(cls, literal):
        """Parse the textual form "p,q,r" (no spaces)."""
        match = _LITERAL.fullmatch(literal) if isinstance(literal, str) else None
        if match is None:
            raise InvalidPositionError(f"expected 'p,q,r', got {literal!r}")
        return cls(*(int(group) for group in match.groups()))

    @classmethod
    def rectangle(cls, n):
        return cls(n, n, n)

    @property
    def squares(self):
        return self.p + self.q + self.r

    @property
    def rows(self):
        return (self.p, self.q, self.r)

    def cut(self, row, new_length):
        """Return the position left after truncating `row` (1, 2 or 3) to `new_length`."""
        p, q, r = self.rows
        if row == 1 and 1 <= new_length < p:
            return Position3(new_length, min(q, new_length), min(r, new_length))
        if row == 2 and 0 <= new_length < q:
            return Position3(p, new_length, min(r, new_length))
        if row == 3 and 0 <= new_length < r:
            return Position3(p, q, new_length)
        raise InvalidPositionError(f"illegal move {row}:{new_length} from {self}")

    def __str__(self):
        return f"{self.p},{self.q},{self.r}"


@dataclass(frozen=True)
class Move:
    """
    A legal truncation of one row.

    Args:
        row: the row being truncated (1, 2 or 3)
        new_length: the length the row is cut to
        result: the position after the move
    """

    row: int
    new_length: int
    result: Position3

    @property
    def label(self):
        return f"{self.row}:{self.new_length}"

    def __str__(self):
        return f"{self.label} -> {self.result}"


def moves(pos: Position3) -> List[Move]:
    """All legal moves of `pos`, row ascending and new length descending.

    The count is always (p - 1) + q + r; distinct moves are kept even if they lead to the same
    position.
    """
    result = []
    for row, length in enumerate(pos.rows, start=1):
        lowest = 1 if row == 1 else 0
        for new_length in range(length - 1, lowest - 1, -1):
            result.append(Move(row, new_length, pos.cut(row, new_length)))
    return result


def options(pos: Position3) -> Set[Position3]:
    """The set of positions reachable from `pos` in one legal move."""
    return {move.result for move in moves(pos)}


def render(pos: Position3):
    """Draw the rows as a grid, `x` marking the poisoned square."""
    lines = []
    for i, length in enumerate(pos.rows):
        cells = ["#"] * length
        if i == 0:
            cells[0] = "x"
        lines.append(f"{i + 1} | " + " ".join(cells))
    return "\n".join(lines)
