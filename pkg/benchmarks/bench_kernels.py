"""Time the compiled and pure-Python raster kernels on the same scenes.

    python benchmarks/bench_kernels.py [--scenes 20] [--canvas 512] [--repeat 3]

Reports best-of-N wall time per backend for the shape fills alone, for whole
renders (which also pay for allocating and copying the canvas), and for
component labeling, plus the speedups.  Also checks that both backends give
the same bytes.
"""

from __future__ import annotations

import argparse
import time

from structprompt.dataset import DatasetConfig, generate_dataset
from structprompt.kernels import backends
from structprompt.layout import Canvas, solve_layout
from structprompt.render import _FILLERS, Palette, render


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenes", type=int, default=20)
    ap.add_argument("--canvas", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    samples = [s for s in generate_dataset(DatasetConfig(1, 1, args.scenes, seed=1)) if s.split == "test"]
    canvas = Canvas(args.canvas, args.canvas, 10)
    layouts = [solve_layout(s.reference, canvas, seed=i) for i, s in enumerate(samples)]
    palette = Palette()
    packed = palette.packed()

    found = backends()
    fills = []
    for lay in layouts:
        for p in lay.placements:
            obj = lay.source.object(p.object_id)
            fills.append((_FILLERS[obj.shape], p.cx, p.cy, p.size, palette.rgb(obj.color)))
    scratch = bytearray(3 * args.canvas * args.canvas)

    def run_fills(mod):
        for name, cx, cy, size, rgb in fills:
            getattr(mod, name)(scratch, args.canvas, args.canvas, cx, cy, size, rgb)

    for mod in found.values():  # warm up allocator and caches
        render(layouts[0], palette, backend=mod)

    results = {}
    for name, mod in sorted(found.items()):
        t_fill, _ = best_of(args.repeat, lambda: run_fills(mod))
        t_render, images = best_of(args.repeat, lambda: [render(lay, palette, backend=mod) for lay in layouts])
        t_label, comps = best_of(
            args.repeat,
            lambda: [mod.label_components(img.pixels, img.width, img.height, packed) for img in images],
        )
        results[name] = (t_fill, t_render, t_label, [img.pixels for img in images], comps)

    print(f"{args.scenes} scenes, {args.canvas}x{args.canvas}, best of {args.repeat}")
    print(f"{'backend':<8} {'fill s':>10} {'render s':>10} {'label s':>10}")
    for name, (tf, tr, tl, _, _) in results.items():
        print(f"{name:<8} {tf:>10.4f} {tr:>10.4f} {tl:>10.4f}")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        same = py[3] == cy[3] and py[4] == cy[4]
        print(f"speedup  {py[0] / cy[0]:>9.1f}x {py[1] / cy[1]:>9.1f}x {py[2] / cy[2]:>9.1f}x")
        print("outputs identical" if same else "OUTPUTS DIFFER")
        return 0 if same else 1
    print("compiled kernels not built; only the pure-Python backend was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
