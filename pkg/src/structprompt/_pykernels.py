"""Pure-Python raster kernels.

Reference twin of ``_ckernels.pyx``: same integer geometry, same output
bytes.  Geometry works in doubled coordinates so every shape with an integer
center and integer size is decided exactly; pixel ``(px, py)`` is inside a
shape iff its center ``(2px+1, 2py+1)`` is.
"""

from __future__ import annotations

from math import isqrt

BACKEND = "python"


def _odd_span(lo: int, hi: int) -> tuple[int, int]:
    """Pixel range [a, b] with lo <= 2p+1 <= hi (empty when a > b)."""
    return -((1 - lo) // 2), (hi - 1) // 2


def _fill_row(buf, w: int, py: int, a: int, b: int, rgb: bytes) -> None:
    a = max(a, 0)
    b = min(b, w - 1)
    if a > b:
        return
    start = 3 * (py * w + a)
    buf[start : start + 3 * (b - a + 1)] = rgb * (b - a + 1)


def fill_square(buf, w: int, h: int, cx: int, cy: int, size: int, rgb: bytes) -> None:
    x0, y0 = 2 * cx - size, 2 * cy - size
    a, b = _odd_span(x0, x0 + 2 * size - 1)
    r0, r1 = _odd_span(y0, y0 + 2 * size - 1)
    for py in range(max(r0, 0), min(r1, h - 1) + 1):
        _fill_row(buf, w, py, a, b, rgb)


def fill_circle(buf, w: int, h: int, cx: int, cy: int, size: int, rgb: bytes) -> None:
    r0, r1 = _odd_span(2 * cy - size + 1, 2 * cy + size - 1)
    for py in range(max(r0, 0), min(r1, h - 1) + 1):
        dy = 2 * py + 1 - 2 * cy
        rest = size * size - dy * dy
        if rest <= 0:
            continue
        m = isqrt(rest - 1)
        a, b = _odd_span(2 * cx - m, 2 * cx + m)
        _fill_row(buf, w, py, a, b, rgb)


def fill_triangle(buf, w: int, h: int, cx: int, cy: int, size: int, rgb: bytes) -> None:
    """Apex at top-center, base of width ``size`` on the bottom edge."""
    top = 2 * cy - size
    r0, r1 = _odd_span(top, top + 2 * size - 1)
    for py in range(max(r0, 0), min(r1, h - 1) + 1):
        depth = 2 * py + 1 - top
        if depth <= 0:
            continue
        m = (depth - 1) // 2
        a, b = _odd_span(2 * cx - m, 2 * cx + m)
        _fill_row(buf, w, py, a, b, rgb)


def label_components(buf, w: int, h: int, palette: bytes) -> list[tuple[int, int, int, int, int, int]]:
    """4-connected components of same-class foreground pixels.

    ``palette`` packs RGB triplets; entry 0 is the background.  Returns
    ``(class, count, x0, y0, x1, y1)`` per component in raster order of the
    component's first pixel, with a half-open bounding box.  Raises
    ``ValueError(pixel_index)`` on a pixel matching no palette entry.
    """
    lookup = {bytes(palette[i : i + 3]): i // 3 for i in range(0, len(palette), 3)}
    bg_row = bytes(palette[:3]) * w
    stride = 3 * w
    data = bytes(buf)
    cls = bytearray(w * h)
    for y in range(h):
        row = data[y * stride : (y + 1) * stride]
        if row == bg_row:
            continue
        base = y * w
        for x in range(w):
            k = lookup.get(row[3 * x : 3 * x + 3])
            if k is None:
                raise ValueError(base + x)
            cls[base + x] = k

    seen = bytearray(w * h)
    out = []
    for start in range(w * h):
        k = cls[start]
        if not k or seen[start]:
            continue
        seen[start] = 1
        stack = [start]
        count = 0
        x0 = y0 = 1 << 30
        x1 = y1 = -1
        while stack:
            i = stack.pop()
            y, x = divmod(i, w)
            count += 1
            if x < x0:
                x0 = x
            if x > x1:
                x1 = x
            if y < y0:
                y0 = y
            if y > y1:
                y1 = y
            for j, ok in ((i - 1, x > 0), (i + 1, x < w - 1), (i - w, y > 0), (i + w, y < h - 1)):
                if ok and not seen[j] and cls[j] == k:
                    seen[j] = 1
                    stack.append(j)
        out.append((k, count, x0, y0, x1 + 1, y1 + 1))
    return out
