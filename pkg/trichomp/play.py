"""
Terminal game against the table engine.

The engine plays a winning move whenever one exists. From a P-position every move loses against
perfect play, so it stalls instead: it takes the move leaving the most squares, the first one in
move order on ties.
"""

import logging
from typing import Callable, Optional

from trichomp.game import InvalidPositionError, Move, Position3, moves, render
from trichomp.recurrence import FTable, winning_moves

logger = logging.getLogger(__name__)

POISON = Position3(1, 0, 0)
USAGE = "enter a move as 'row length', e.g. '3 1' cuts the third row to length 1"


def engine_move(table: FTable, pos: Position3) -> Move:
    """The move the engine plays from `pos`, which must have at least one move."""
    winning = winning_moves(table, pos)
    if winning:
        return winning[0]
    # max keeps the first of equal keys
    return max(moves(pos), key=lambda move: move.result.squares)


def parse_move(text, pos: Position3) -> Move:
    """Parse "row length" into a legal move of `pos`."""
    parts = text.split()
    if len(parts) != 2 or not all(part.isdecimal() for part in parts):
        raise InvalidPositionError(f"cannot read {text!r}; {USAGE}")
    row, length = (int(part) for part in parts)
    if row not in (1, 2, 3):
        raise InvalidPositionError(f"there is no row {row}; {USAGE}")
    return Move(row, length, pos.cut(row, length))


class PlaySession:
    """
    One game on the rectangle [n, n, n].

    Args:
        table: a table covering q <= n
        n: size of the starting rectangle
        engine_first: whether the engine makes the first move
        read: prompt function returning the human's input line
        write: output function
    """

    def __init__(
        self,
        table: FTable,
        n,
        engine_first=False,
        read: Callable[[str], str] = input,
        write: Callable[[str], None] = print,
    ):
        self.table = table
        self.position = Position3.rectangle(n)
        self.engine_to_move = engine_first
        self.read = read
        self.write = write
        self.history = []

    def _human_move(self) -> Optional[Move]:
        while True:
            try:
                text = self.read("your move> ")
            except EOFError:
                return None
            try:
                return parse_move(text, self.position)
            except InvalidPositionError as err:
                self.write(str(err))

    def run(self) -> Optional[str]:
        """Play until someone faces the poisoned square alone.

        Returns:
            "human" or "engine" for the loser, None if the input ended first
        """
        while True:
            self.write(render(self.position))
            mover = "engine" if self.engine_to_move else "human"
            if self.position == POISON:
                self.write(f"only the poisoned square is left: {mover} loses")
                return mover
            if self.engine_to_move:
                move = engine_move(self.table, self.position)
                self.write(f"engine plays {move.label}")
            else:
                move = self._human_move()
                if move is None:
                    self.write("input closed, game abandoned")
                    return None
            logger.debug("%s: %s", mover, move)
            self.history.append(move)
            self.position = move.result
            self.engine_to_move = not self.engine_to_move
