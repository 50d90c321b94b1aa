"""
Run settings shared by the table builders, the verification suite and the command line.
"""

from dataclasses import dataclass
import logging
from typing import Optional

logger = logging.getLogger(__name__)

DEFAULT_N_MAX = 2000
DEFAULT_ORACLE_BOUND = 120
DEFAULT_CUBIC_BOUND = 150
DEFAULT_MEMORY_CEILING = 4 * 1024**3

ENGINES = ("reference", "sparse")
FORMATS = ("csv", "jsonl", "runs", "hdf5")


class UsageError(ValueError):
    """Inconsistent settings or a request outside the computed range."""


class ResourceCeilingError(MemoryError):
    """An allocation would exceed the configured memory ceiling."""


def check_memory(required_bytes, memory_ceiling, what):
    """Raise ResourceCeilingError if `required_bytes` does not fit under the ceiling.

    Args:
        required_bytes: estimated size of the allocation
        memory_ceiling: maximum number of bytes allowed, None disables the check
        what: short description used in the error message
    """
    if memory_ceiling is None or required_bytes <= memory_ceiling:
        return
    logger.error("%s refused: %d bytes requested, ceiling %d", what, required_bytes, memory_ceiling)
    raise ResourceCeilingError(
        f"{what} needs about {required_bytes / 1024**2:.1f} MiB, "
        f"above the ceiling of {memory_ceiling / 1024**2:.1f} MiB"
    )


@dataclass(frozen=True)
class Config:
    """
    Config object collecting the knobs of a run.

    Args:
        n_max: largest second-row length of the f table
        engine: table engine, "reference" (dense) or "sparse" (run-length columns)
        oracle_bound: largest first-row length covered by the brute-force oracle
        cubic_bound: scan bound of the cubic-cost checks
        format: export format of `compute`
        memory_ceiling: maximum number of bytes a single table may take
    """

    n_max: int = DEFAULT_N_MAX
    engine: str = "sparse"
    oracle_bound: Optional[int] = DEFAULT_ORACLE_BOUND
    cubic_bound: Optional[int] = DEFAULT_CUBIC_BOUND
    format: str = "csv"
    memory_ceiling: int = DEFAULT_MEMORY_CEILING

    def __post_init__(self):
        if self.n_max < 0:
            raise UsageError(f"n_max must be nonnegative (got {self.n_max})")
        if self.engine not in ENGINES:
            raise UsageError(f"engine must be one of {ENGINES} (got {self.engine!r})")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS} (got {self.format!r})")
        for name in ("oracle_bound", "cubic_bound"):
            bound = getattr(self, name)
            # None skips the corresponding checks
            if bound is not None and not 1 <= bound <= self.n_max:
                raise UsageError(f"{name} must lie in [1, n_max={self.n_max}] (got {bound})")
        if self.memory_ceiling <= 0:
            raise UsageError("memory_ceiling must be positive")
