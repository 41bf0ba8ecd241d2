#!/usr/bin/env python3
"""Run the full desk-scale scenario suite and print the summary table.

Thin wrapper over `tclab run configs/desk.json`; use --jobs to spread
scenarios over cores.
"""

import argparse
import os
import sys

from tclab.cli import main as tclab_main

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIG = os.path.join(HERE, "..", "configs", "desk.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="artifact directory")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--config", default=CONFIG)
    args = parser.parse_args()
    return tclab_main(["run", args.config, "--out", args.out,
                       "--jobs", str(args.jobs)])


if __name__ == "__main__":
    sys.exit(main())
