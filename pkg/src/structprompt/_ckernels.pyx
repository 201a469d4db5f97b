# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled raster kernels; byte-for-byte twin of ``_pykernels``."""

from libc.stdlib cimport malloc, free
from libc.math cimport sqrt

BACKEND = "cython"


cdef inline long _ceil_half(long v):
    # ceil(v / 2) for any sign
    return -((-v) // 2)


cdef inline long _isqrt(long n):
    cdef long r = <long>sqrt(<double>n)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef inline void _fill_row(unsigned char[::1] buf, long w, long py, long a, long b,
                           unsigned char r, unsigned char g, unsigned char bl):
    cdef long x, i
    if a < 0:
        a = 0
    if b > w - 1:
        b = w - 1
    i = 3 * (py * w + a)
    for x in range(a, b + 1):
        buf[i] = r
        buf[i + 1] = g
        buf[i + 2] = bl
        i += 3


def fill_square(unsigned char[::1] buf, long w, long h, long cx, long cy, long size, bytes rgb):
    cdef long x0 = 2 * cx - size, y0 = 2 * cy - size
    cdef long a = _ceil_half(x0 - 1), b = (x0 + 2 * size - 2) // 2
    cdef long r0 = _ceil_half(y0 - 1), r1 = (y0 + 2 * size - 2) // 2
    cdef long py
    cdef unsigned char cr = rgb[0], cg = rgb[1], cb = rgb[2]
    if r0 < 0:
        r0 = 0
    if r1 > h - 1:
        r1 = h - 1
    for py in range(r0, r1 + 1):
        _fill_row(buf, w, py, a, b, cr, cg, cb)


def fill_circle(unsigned char[::1] buf, long w, long h, long cx, long cy, long size, bytes rgb):
    cdef long r0 = _ceil_half(2 * cy - size), r1 = (2 * cy + size - 2) // 2
    cdef long py, dy, rest, m
    cdef unsigned char cr = rgb[0], cg = rgb[1], cb = rgb[2]
    if r0 < 0:
        r0 = 0
    if r1 > h - 1:
        r1 = h - 1
    for py in range(r0, r1 + 1):
        dy = 2 * py + 1 - 2 * cy
        rest = size * size - dy * dy
        if rest <= 0:
            continue
        m = _isqrt(rest - 1)
        _fill_row(buf, w, py, _ceil_half(2 * cx - m - 1), (2 * cx + m - 1) // 2, cr, cg, cb)


def fill_triangle(unsigned char[::1] buf, long w, long h, long cx, long cy, long size, bytes rgb):
    cdef long top = 2 * cy - size
    cdef long r0 = _ceil_half(top - 1), r1 = (top + 2 * size - 2) // 2
    cdef long py, depth, m
    cdef unsigned char cr = rgb[0], cg = rgb[1], cb = rgb[2]
    if r0 < 0:
        r0 = 0
    if r1 > h - 1:
        r1 = h - 1
    for py in range(r0, r1 + 1):
        depth = 2 * py + 1 - top
        if depth <= 0:
            continue
        m = (depth - 1) // 2
        _fill_row(buf, w, py, _ceil_half(2 * cx - m - 1), (2 * cx + m - 1) // 2, cr, cg, cb)


def label_components(const unsigned char[::1] buf, long w, long h, bytes palette):
    cdef long n = w * h
    cdef long k = len(palette) // 3
    cdef const unsigned char* pal = palette
    cdef unsigned char* cls = <unsigned char*>malloc(n)
    cdef unsigned char* seen = <unsigned char*>malloc(n)
    cdef long* stack = <long*>malloc(n * sizeof(long))
    cdef long i, j, c, p, top, count, x, y, x0, y0, x1, y1, bad = -1
    cdef unsigned char r, g, b, kk
    out = []
    if cls == NULL or seen == NULL or stack == NULL:
        free(cls); free(seen); free(stack)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                seen[i] = 0
                r = buf[3 * i]
                g = buf[3 * i + 1]
                b = buf[3 * i + 2]
                cls[i] = 255
                for c in range(k):
                    if pal[3 * c] == r and pal[3 * c + 1] == g and pal[3 * c + 2] == b:
                        cls[i] = <unsigned char>c
                        break
                if cls[i] == 255:
                    bad = i
                    break
        if bad >= 0:
            raise ValueError(bad)

        for p in range(n):
            kk = cls[p]
            if kk == 0 or seen[p]:
                continue
            seen[p] = 1
            stack[0] = p
            top = 1
            count = 0
            x0 = w
            y0 = h
            x1 = -1
            y1 = -1
            while top > 0:
                top -= 1
                i = stack[top]
                y = i // w
                x = i - y * w
                count += 1
                if x < x0: x0 = x
                if x > x1: x1 = x
                if y < y0: y0 = y
                if y > y1: y1 = y
                if x > 0:
                    j = i - 1
                    if not seen[j] and cls[j] == kk:
                        seen[j] = 1; stack[top] = j; top += 1
                if x < w - 1:
                    j = i + 1
                    if not seen[j] and cls[j] == kk:
                        seen[j] = 1; stack[top] = j; top += 1
                if y > 0:
                    j = i - w
                    if not seen[j] and cls[j] == kk:
                        seen[j] = 1; stack[top] = j; top += 1
                if y < h - 1:
                    j = i + w
                    if not seen[j] and cls[j] == kk:
                        seen[j] = 1; stack[top] = j; top += 1
            out.append((kk, count, x0, y0, x1 + 1, y1 + 1))
    finally:
        free(cls)
        free(seen)
        free(stack)
    return out
