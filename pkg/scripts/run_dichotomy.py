#!/usr/bin/env python3
"""Growth verdicts for every base point of every scenario, with per-scenario max/min.

    python scripts/run_dichotomy.py [--radius R] [scenarios/*.yaml ...]

Prints one CSV row per (scenario, base point, object) and a summary row per
scenario with the spread of the degree or rate estimates.
"""
import argparse
import csv
import sys
import time
from pathlib import Path

from homgrowth.engine import ResourceCapExceeded, germ_ball, orbit_ball
from homgrowth.growth import GrowthSeries, TooFewPoints, classify_growth
from homgrowth.moebius import format_point
from homgrowth.scenario import ScenarioError, load

ROOT = Path(__file__).resolve().parents[1]
DEFAULT = ["rotation", "sanov", "parabolic", "free_semigroup"]


def verdict(series, params):
    try:
        return classify_growth(series, params)
    except TooFewPoints:
        return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenarios", nargs="*")
    ap.add_argument("--radius", type=int, default=None, help="override caps.max_radius")
    args = ap.parse_args(argv)
    paths = args.scenarios or [ROOT / "scenarios" / f"{n}.yaml" for n in DEFAULT]

    w = csv.writer(sys.stdout)
    w.writerow(["scenario", "point", "object", "radius", "size", "kind", "estimate", "seconds"])
    for path in paths:
        try:
            sc = load(path)
        except ScenarioError as e:
            print(f"# skipped: {e}", file=sys.stderr)
            continue
        R = args.radius if args.radius is not None else sc.caps.max_radius
        estimates = {"germ": [], "orbit": []}
        for x in sc.base_points:
            t0 = time.perf_counter()
            try:
                ball = germ_ball(sc.spec, x, R, max_nodes=sc.caps.max_nodes)
            except ResourceCapExceeded as e:
                w.writerow([sc.name, format_point(x), "germ", R, "", "CAP", str(e), ""])
                continue
            orbit = orbit_ball(sc.spec, x, R, ball=ball)
            dt = time.perf_counter() - t0
            for obj, series, size in (("germ", GrowthSeries.from_ball(ball), len(ball)),
                                      ("orbit", GrowthSeries.from_orbit(orbit, R), len(orbit))):
                v = verdict(series, sc.classifier)
                kind = v.kind if v else "TOO-FEW-POINTS"
                est = "" if v is None or v.estimate is None else f"{v.estimate:.4f}"
                if v is not None and v.estimate is not None:
                    estimates[obj].append((v.kind, v.estimate))
                w.writerow([sc.name, format_point(x), obj, R, size, kind, est, f"{dt:.3f}"])
        for obj, ests in estimates.items():
            if ests:
                vals = [e for _, e in ests]
                kinds = "/".join(sorted({k for k, _ in ests}))
                w.writerow([sc.name, "summary", obj, R, "", kinds,
                            f"min={min(vals):.4f} max={max(vals):.4f}", ""])


if __name__ == "__main__":
    main()
