#!/usr/bin/env python3
"""Sweep the round-robin-grid gap experiment across network sizes.

Replays k relabeled grid phases per size and tabulates the adaptive
network's average cost against the demand-oblivious fabric; the ratio
should widen as n grows while the per-phase conditional entropy stays flat.

Usage: python scripts/compare_sweep.py [outdir]
"""

import sys

from renet.cli import main

outdir = sys.argv[1] if len(sys.argv) > 1 else "out/gap_sweep"
sys.exit(
    main(
        [
            "compare",
            "--workload", "rrg",
            "--n-list", "64,256,1024",
            "--phases", "8",
            "--m", "0",           # pick 50 * n per cell
            "--c", "4",
            "--seed", "1",
            "--out", outdir,
        ]
    )
)
