#!/usr/bin/env python3
"""Recurrence depth N against the half-width of V for the rotation scenario.

    python scripts/recurrence_scan.py [--ncap 200]

Shrinking V = arc(-w, w) forces longer words to cover U; the table is
plot-ready CSV (halfwidth, N, pieces).
"""
import argparse
import csv
import sys
from fractions import Fraction

from homgrowth.engine import GeneratingSystem, PseudogroupSpec
from homgrowth.moebius import FULL, GroupElement, arc
from homgrowth.recurrence import find_recurrence_N, verify_certificate

ROTATION = GroupElement(3, -4, 4, 3)
WIDTHS = [Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16),
          Fraction(1, 32)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ncap", type=int, default=200)
    args = ap.parse_args(argv)
    S = GeneratingSystem([("r", ROTATION)])
    w = csv.writer(sys.stdout)
    w.writerow(["halfwidth", "N", "pieces", "reverified"])
    for hw in WIDTHS:
        spec = PseudogroupSpec(S, FULL, arc(-hw, hw))
        result = find_recurrence_N(spec, args.ncap)
        if not result:
            w.writerow([str(hw), "", "", "inconclusive"])
            continue
        N, cert = result
        w.writerow([str(hw), N, len(cert.pieces), verify_certificate(cert)])


if __name__ == "__main__":
    main()
