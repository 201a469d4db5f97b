"""Alias-free rasterization of layouts and binary PPM (P6) I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from structprompt import kernels
from structprompt.errors import MalformedPPM
from structprompt.layout import Layout
from structprompt.tuples import Color, Shape

RGB = tuple[int, int, int]

DEFAULT_COLORS: dict[Color, RGB] = {
    Color.RED: (255, 0, 0),
    Color.GREEN: (0, 128, 0),
    Color.BLUE: (0, 0, 255),
    Color.YELLOW: (255, 255, 0),
    Color.PURPLE: (128, 0, 128),
    Color.BROWN: (128, 64, 0),
    Color.GRAY: (128, 128, 128),
    Color.CYAN: (0, 255, 255),
}


@dataclass(frozen=True)
class Palette:
    colors: dict[Color, RGB] = field(default_factory=lambda: dict(DEFAULT_COLORS))
    background: RGB = (255, 255, 255)

    def __post_init__(self):
        entries = [self.background] + [self.colors[c] for c in Color]
        for i, a in enumerate(entries):
            for b in entries[i + 1 :]:
                diffs = [abs(x - y) for x, y in zip(a, b) if x != y]
                if not diffs or min(diffs) < 64:
                    raise ValueError(f"palette entries {a} and {b} are too close")

    def rgb(self, color: Color) -> bytes:
        return bytes(self.colors[color])

    def packed(self) -> bytes:
        """Background first, then colors in :class:`Color` order (kernel format)."""
        return bytes(self.background) + b"".join(self.rgb(c) for c in Color)

    def color_at(self, index: int) -> Color:
        return list(Color)[index - 1]


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    pixels: bytes  # row-major RGB

    def __post_init__(self):
        if len(self.pixels) != self.width * self.height * 3:
            raise ValueError(f"pixel buffer has {len(self.pixels)} bytes, expected {self.width * self.height * 3}")

    def pixel(self, x: int, y: int) -> RGB:
        i = 3 * (y * self.width + x)
        return tuple(self.pixels[i : i + 3])


_FILLERS = {
    Shape.CUBE: "fill_square",
    Shape.SPHERE: "fill_circle",
    Shape.TRIANGLE: "fill_triangle",
}


def render(layout: Layout, palette: Palette | None = None, backend=None) -> RasterImage:
    """Draw each object as a flat shape; later objects paint over earlier ones."""
    palette = palette or Palette()
    impl = backend or kernels
    w, h = layout.canvas.width, layout.canvas.height
    buf = bytearray(bytes(palette.background) * (w * h))
    for p in layout.placements:
        obj = layout.source.object(p.object_id)
        fill = getattr(impl, _FILLERS[obj.shape])
        fill(buf, w, h, p.cx, p.cy, p.size, palette.rgb(obj.color))
    return RasterImage(w, h, bytes(buf))


def encode_ppm(img: RasterImage) -> bytes:
    return b"P6\n%d %d\n255\n" % (img.width, img.height) + img.pixels


_HEADER = re.compile(rb"P6\s+(\d+)\s+(\d+)\s+(\d+)\s")


def decode_ppm(data: bytes) -> RasterImage:
    if not data.startswith(b"P6"):
        raise MalformedPPM("missing P6 magic", 0)
    # comments are not written by encode_ppm and are rejected here
    m = _HEADER.match(data)
    if not m:
        raise MalformedPPM("malformed header", 2)
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise MalformedPPM(f"unsupported maxval {maxval}", m.start(3))
    if w <= 0 or h <= 0:
        raise MalformedPPM("non-positive dimensions", m.start(1))
    body = data[m.end() :]
    need = w * h * 3
    if len(body) < need:
        raise MalformedPPM(f"truncated pixel data ({len(body)} of {need} bytes)", len(data))
    if len(body) > need:
        raise MalformedPPM("trailing bytes after pixel data", m.end() + need)
    return RasterImage(w, h, bytes(body))


def write_ppm(img: RasterImage, path) -> None:
    Path(path).write_bytes(encode_ppm(img))


def read_ppm(path) -> RasterImage:
    return decode_ppm(Path(path).read_bytes())
