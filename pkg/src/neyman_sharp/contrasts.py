"""Model matrix of the 2x2 factorial design and the three factorial contrasts.

Arms are ordered z_1 = (-1, -1), z_2 = (-1, 1), z_3 = (1, -1), z_4 = (1, 1).
Column h_l of the model matrix defines effect l: 1 and 2 are the main effects of
the first and second factor, 3 is their interaction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

EFFECTS = (1, 2, 3)

_H = np.array(
    [
        [1, -1, -1, 1],
        [1, -1, 1, -1],
        [1, 1, -1, -1],
        [1, 1, 1, 1],
    ],
    dtype=np.int64,
)
_H.setflags(write=False)


def model_matrix() -> np.ndarray:
    """Return the 4x4 model matrix; rows are arms z_1..z_4, columns h_0..h_3."""
    return _H.copy()


def check_effect(l: int) -> int:
    if l not in EFFECTS:
        raise ValueError(f"effect index must be one of {EFFECTS}, got {l!r}")
    return l


@dataclass(frozen=True)
class Contrast:
    index: int
    h: tuple[int, int, int, int]

    @property
    def minus(self) -> tuple[int, ...]:
        """Arms (1-based) with coefficient -1."""
        return tuple(j + 1 for j, v in enumerate(self.h) if v == -1)

    @property
    def plus(self) -> tuple[int, ...]:
        """Arms (1-based) with coefficient +1."""
        return tuple(j + 1 for j, v in enumerate(self.h) if v == 1)

    def vector(self) -> np.ndarray:
        return np.array(self.h, dtype=np.int64)


@lru_cache(maxsize=None)
def contrast(l: int) -> Contrast:
    check_effect(l)
    return Contrast(l, tuple(int(v) for v in _H[:, l]))
