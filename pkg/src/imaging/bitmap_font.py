"""
PrivAR Privacy Pipeline
Bitmap Font Module

Embedded 5x7 bitmap font used for warning banners and synthetic fixtures.
Lowercase letters render with the uppercase glyph.

Author: PrivAR Team
License: MIT
"""

from typing import Dict, Sequence, Tuple, Union

import numpy as np

GLYPH_WIDTH = 5
GLYPH_HEIGHT = 7
# Blank column between glyphs
GLYPH_SPACING = 1

_GLYPH_ROWS: Dict[str, Tuple[str, ...]] = {
    'A': ('.###.', '#...#', '#...#', '#####', '#...#', '#...#', '#...#'),
    'B': ('####.', '#...#', '#...#', '####.', '#...#', '#...#', '####.'),
    'C': ('.###.', '#...#', '#....', '#....', '#....', '#...#', '.###.'),
    'D': ('####.', '#...#', '#...#', '#...#', '#...#', '#...#', '####.'),
    'E': ('#####', '#....', '#....', '####.', '#....', '#....', '#####'),
    'F': ('#####', '#....', '#....', '####.', '#....', '#....', '#....'),
    'G': ('.###.', '#...#', '#....', '#.###', '#...#', '#...#', '.####'),
    'H': ('#...#', '#...#', '#...#', '#####', '#...#', '#...#', '#...#'),
    'I': ('.###.', '..#..', '..#..', '..#..', '..#..', '..#..', '.###.'),
    'J': ('..###', '...#.', '...#.', '...#.', '...#.', '#..#.', '.##..'),
    'K': ('#...#', '#..#.', '#.#..', '##...', '#.#..', '#..#.', '#...#'),
    'L': ('#....', '#....', '#....', '#....', '#....', '#....', '#####'),
    'M': ('#...#', '##.##', '#.#.#', '#.#.#', '#...#', '#...#', '#...#'),
    'N': ('#...#', '#...#', '##..#', '#.#.#', '#..##', '#...#', '#...#'),
    'O': ('.###.', '#...#', '#...#', '#...#', '#...#', '#...#', '.###.'),
    'P': ('####.', '#...#', '#...#', '####.', '#....', '#....', '#....'),
    'Q': ('.###.', '#...#', '#...#', '#...#', '#.#.#', '#..#.', '.##.#'),
    'R': ('####.', '#...#', '#...#', '####.', '#.#..', '#..#.', '#...#'),
    'S': ('.####', '#....', '#....', '.###.', '....#', '....#', '####.'),
    'T': ('#####', '..#..', '..#..', '..#..', '..#..', '..#..', '..#..'),
    'U': ('#...#', '#...#', '#...#', '#...#', '#...#', '#...#', '.###.'),
    'V': ('#...#', '#...#', '#...#', '#...#', '#...#', '.#.#.', '..#..'),
    'W': ('#...#', '#...#', '#...#', '#.#.#', '#.#.#', '#.#.#', '.#.#.'),
    'X': ('#...#', '#...#', '.#.#.', '..#..', '.#.#.', '#...#', '#...#'),
    'Y': ('#...#', '#...#', '.#.#.', '..#..', '..#..', '..#..', '..#..'),
    'Z': ('#####', '....#', '...#.', '..#..', '.#...', '#....', '#####'),
    '0': ('.###.', '#...#', '#..##', '#.#.#', '##..#', '#...#', '.###.'),
    '1': ('..#..', '.##..', '..#..', '..#..', '..#..', '..#..', '.###.'),
    '2': ('.###.', '#...#', '....#', '...#.', '..#..', '.#...', '#####'),
    '3': ('#####', '...#.', '..#..', '...#.', '....#', '#...#', '.###.'),
    '4': ('...#.', '..##.', '.#.#.', '#..#.', '#####', '...#.', '...#.'),
    '5': ('#####', '#....', '####.', '....#', '....#', '#...#', '.###.'),
    '6': ('..##.', '.#...', '#....', '####.', '#...#', '#...#', '.###.'),
    '7': ('#####', '....#', '...#.', '..#..', '.#...', '.#...', '.#...'),
    '8': ('.###.', '#...#', '#...#', '.###.', '#...#', '#...#', '.###.'),
    '9': ('.###.', '#...#', '#...#', '.####', '....#', '...#.', '.##..'),
    ' ': ('.....',) * 7,
    '!': ('..#..', '..#..', '..#..', '..#..', '..#..', '.....', '..#..'),
    '.': ('.....', '.....', '.....', '.....', '.....', '.##..', '.##..'),
    ',': ('.....', '.....', '.....', '.....', '.##..', '..#..', '.#...'),
    '-': ('.....', '.....', '.....', '#####', '.....', '.....', '.....'),
    ':': ('.....', '.##..', '.##..', '.....', '.##..', '.##..', '.....'),
    '/': ('.....', '....#', '...#.', '..#..', '.#...', '#....', '.....'),
    '?': ('.###.', '#...#', '....#', '...#.', '..#..', '.....', '..#..'),
}

GLYPHS: Dict[str, np.ndarray] = {
    char: np.array([[c == '#' for c in row] for row in rows], dtype=bool)
    for char, rows in _GLYPH_ROWS.items()
}

Color = Union[int, Sequence[int]]


def _glyph(char: str) -> np.ndarray:
    glyph = GLYPHS.get(char.upper())
    if glyph is None:
        return GLYPHS['?']
    return glyph


def text_size(text: str, scale: int = 1) -> Tuple[int, int]:
    """(width, height) in pixels of a single-line string."""
    if not text:
        return 0, 0
    width = len(text) * (GLYPH_WIDTH + GLYPH_SPACING) - GLYPH_SPACING
    return width * scale, GLYPH_HEIGHT * scale


def text_mask(text: str, scale: int = 1) -> np.ndarray:
    """Boolean raster of the rendered string."""
    width, height = text_size(text, scale)
    mask = np.zeros((height, width), dtype=bool)
    for i, char in enumerate(text):
        glyph = np.kron(_glyph(char), np.ones((scale, scale), dtype=bool))
        x0 = i * (GLYPH_WIDTH + GLYPH_SPACING) * scale
        mask[:, x0:x0 + GLYPH_WIDTH * scale] = glyph
    return mask


def render_text(
    canvas: np.ndarray,
    text: str,
    x: int,
    y: int,
    color: Color = 0,
    scale: int = 1,
) -> np.ndarray:
    """
    Draw text onto a canvas in place; glyphs falling off the canvas are clipped.

    Args:
        canvas: uint8 array (H, W) or (H, W, 3), modified in place
        text: Single line of text
        x: Left edge in pixels
        y: Top edge in pixels
        color: Gray level or RGB triple
        scale: Integer pixel magnification

    Returns:
        The canvas
    """
    mask = text_mask(text, scale)
    if mask.size == 0:
        return canvas
    height, width = canvas.shape[:2]
    x0, y0 = max(0, x), max(0, y)
    x1 = min(width, x + mask.shape[1])
    y1 = min(height, y + mask.shape[0])
    if x1 <= x0 or y1 <= y0:
        return canvas
    clip = mask[y0 - y:y1 - y, x0 - x:x1 - x]
    canvas[y0:y1, x0:x1][clip] = color
    return canvas
