import itertools
import math

import pytest
from oracles import circle_pixels

from structprompt.errors import MalformedPPM
from structprompt.layout import Canvas, Layout, Placement, solve_layout
from structprompt.render import Palette, RasterImage, decode_ppm, encode_ppm, render
from structprompt.tuples import Color, ObjectTuple, Shape, StructuredInfo


def _single(shape, size, color=Color.RED, canvas=256, cx=None, cy=None):
    info = StructuredInfo((ObjectTuple(1, color, shape),))
    c = Canvas(canvas, canvas, 10)
    return Layout(c, (Placement(1, cx or canvas // 2, cy or canvas // 2, size),), info)


def _count(img, rgb):
    px = img.pixels
    return sum(1 for i in range(0, len(px), 3) if tuple(px[i : i + 3]) == rgb)


def test_default_palette_is_valid():
    pal = Palette()
    entries = [pal.background] + [pal.colors[c] for c in Color]
    assert len(set(entries)) == 9
    for a, b in itertools.combinations(entries, 2):
        assert all(abs(x - y) >= 64 for x, y in zip(a, b) if x != y)


def test_palette_rejects_close_colors():
    colors = dict(Palette().colors)
    colors[Color.RED] = (250, 10, 0)
    colors[Color.BROWN] = (250, 0, 0)
    with pytest.raises(ValueError):
        Palette(colors)


def test_square_area(backend):
    img = render(_single(Shape.CUBE, 64), backend=backend)
    assert _count(img, (255, 0, 0)) == 64 * 64


@pytest.mark.parametrize("size", [16, 64, 200])
def test_triangle_area_tends_to_half(backend, size):
    img = render(_single(Shape.TRIANGLE, size, canvas=256), backend=backend)
    assert _count(img, (255, 0, 0)) / size**2 == pytest.approx(0.5, abs=1.0 / size)


def test_circle_fill_ratio_against_per_pixel_oracle(backend):
    img = render(_single(Shape.SPHERE, 64, canvas=128), backend=backend)
    count = _count(img, (255, 0, 0))
    assert count == circle_pixels(64, 64, 64, 128, 128)
    assert abs(count / 64**2 - math.pi / 4) <= 0.02


@pytest.mark.parametrize("shape", list(Shape))
def test_containment_and_purity(backend, shape):
    lay = _single(shape, 40, color=Color.CYAN, canvas=128, cx=50, cy=70)
    img = render(lay, backend=backend)
    allowed = {Palette().background, Palette().colors[Color.CYAN]}
    for y in range(128):
        for x in range(128):
            rgb = img.pixel(x, y)
            assert rgb in allowed
            if rgb != Palette().background:
                assert 30 <= x < 70 and 50 <= y < 90


def test_triangle_apex_on_top(backend):
    img = render(_single(Shape.TRIANGLE, 32, canvas=128), backend=backend)
    red = (255, 0, 0)
    top_row = [x for x in range(128) if img.pixel(x, 49) == red]
    bottom_row = [x for x in range(128) if img.pixel(x, 79) == red]
    assert len(top_row) < 4 and len(bottom_row) >= 30


def test_render_is_deterministic(cubes_info):
    lay = solve_layout(cubes_info, Canvas(), seed=2)
    assert encode_ppm(render(lay)) == encode_ppm(render(lay))


def test_ppm_white_pixel():
    assert encode_ppm(RasterImage(1, 1, b"\xff\xff\xff")) == b"P6\n1 1\n255\n\xff\xff\xff"
    assert len(encode_ppm(RasterImage(1, 1, b"\xff\xff\xff"))) == 3 + 4 + 4 + 3


def test_ppm_round_trip(cubes_info):
    img = render(solve_layout(cubes_info, Canvas(), seed=2))
    data = encode_ppm(img)
    assert decode_ppm(data) == img
    assert encode_ppm(decode_ppm(data)) == data


@pytest.mark.parametrize(
    "data",
    [
        b"P6\n2 2\n255\n\x00\x00\x00",
        b"P3\n1 1\n255\n\x00\x00\x00",
        b"P6\n1 1\n65535\n\x00\x00\x00",
        b"P6\n1 x\n255\n\x00\x00\x00",
        b"P6\n1 1\n255\n\x00\x00\x00\x00",
        b"",
    ],
)
def test_malformed_ppm(data):
    with pytest.raises(MalformedPPM):
        decode_ppm(data)


def test_truncated_offset():
    with pytest.raises(MalformedPPM) as err:
        decode_ppm(b"P6\n2 2\n255\n\x00\x00\x00")
    assert err.value.offset == 14


def test_raster_image_checks_length():
    with pytest.raises(ValueError):
        RasterImage(2, 2, b"\x00" * 11)
