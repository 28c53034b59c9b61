"""Grid maps of retained token positions, rendered as PGM (P5) and SVG."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GridMismatch, IndexOutOfRange


class CellState(enum.IntEnum):
    REMOVED = 0
    BACKFILLED = 1
    RETAINED = 2


# grey level per state: retained light, backfilled mid-grey, removed dark
GREY = {CellState.REMOVED: 32, CellState.BACKFILLED: 128, CellState.RETAINED: 235}


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    cells: np.ndarray  # (height, width) of CellState values

    @classmethod
    def from_selection(cls, width: int, height: int, n: int, indices: Iterable[int], backfilled: Iterable[int] = ()):
        """Tokens are laid out row-major: index ``i`` sits at row ``i // width``."""
        if width < 1 or height < 1 or width * height != n:
            raise GridMismatch(f"grid {width}x{height} does not cover {n} tokens")
        flat = np.full(n, CellState.REMOVED, dtype=np.uint8)
        for group, state in ((indices, CellState.RETAINED), (backfilled, CellState.BACKFILLED)):
            for i in group:
                if not 0 <= i < n:
                    raise IndexOutOfRange(f"index {i} outside [0, {n})")
                flat[i] = state
        return cls(width, height, flat.reshape(height, width))

    def count(self, state: CellState) -> int:
        return int((self.cells == state).sum())

    def to_pgm(self, cell_px: int = 8) -> bytes:
        lut = np.zeros(3, dtype=np.uint8)
        for state, g in GREY.items():
            lut[state] = g
        img = np.kron(lut[self.cells], np.ones((cell_px, cell_px), dtype=np.uint8))
        header = f"P5\n{self.width * cell_px} {self.height * cell_px}\n255\n".encode("ascii")
        return header + img.tobytes()

    def to_svg(self, cell_px: int = 16) -> str:
        w, h = self.width * cell_px, self.height * cell_px
        lines = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
            f'<rect width="{w}" height="{h}" fill="#000000"/>',
        ]
        for r in range(self.height):
            for c in range(self.width):
                g = GREY[CellState(int(self.cells[r, c]))]
                lines.append(
                    f'<rect x="{c * cell_px}" y="{r * cell_px}" width="{cell_px}" height="{cell_px}" '
                    f'fill="#{g:02x}{g:02x}{g:02x}" stroke="#000000" stroke-width="1"/>'
                )
        lines.append("</svg>")
        return "\n".join(lines) + "\n"


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary PGM with maxval < 256 (used to check emitted images)."""
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval > 255:
        raise ValueError("16-bit PGM not supported")
    pixels = data[len(data) - w * h :]
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)
