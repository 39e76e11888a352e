#!/usr/bin/env python3
"""Windowed entropy report for a hub-and-spokes workload.

Emits the prefix and trailing-window entropy series (marginals and
conditionals) as CSV; the windowed conditional entropy should sit
strictly below the windowed marginal entropy throughout.

Usage: python scripts/entropy_report.py [outdir]
"""

import sys

from renet.cli import main

outdir = sys.argv[1] if len(sys.argv) > 1 else "out/star_entropy"
sys.exit(
    main(
        [
            "entropy",
            "--workload", "star",
            "--n", "256",
            "--m", "100000",
            "--alpha", "1.0",
            "--window", "10000",
            "--stride", "10000",
            "--seed", "1",
            "--out", outdir,
        ]
    )
)
