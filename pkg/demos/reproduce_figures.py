"""Regenerate every figure preset as CSV files.

Equivalent to running ``secsat run --preset figN --out figN.csv`` for each
preset.  Pass a directory as the first argument (default: ./figures) and
optionally a trial count as the second.

Run:  python demos/reproduce_figures.py out_dir 100000
"""

import pathlib
import sys
import time

from secsat.experiments import PRESETS, emit_csv, preset, run_scenario

out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "figures")
trials = int(sys.argv[2]) if len(sys.argv) > 2 else None
out_dir.mkdir(parents=True, exist_ok=True)

for name in sorted(PRESETS):
    scenario = preset(name, **({"trials": trials} if trials else {}))
    start = time.perf_counter()
    curves = run_scenario(scenario)
    emit_csv(curves, out_dir / f"{name}.csv")
    print(f"{name}: {len(curves)} curves, {scenario.trials} trials, {time.perf_counter() - start:.1f}s")
    for c in curves[:3]:
        head = ", ".join(f"{x:g}:{sop:.3f}" for x, sop, _ in c.points[:4])
        print(f"    {c.label:<32} {head} ...")
