#!/usr/bin/env python3
"""Failure fraction of the fixed-point construction as the existence time
shrinks, on the shipped moderate preset (same run as `gkdvlab lwp-ensemble
--config configs/lwp.ini`)."""

import sys

from gkdvlab.cli import main as cli_main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out-lwp"
    code = cli_main(["lwp-ensemble", "--config", "configs/lwp.ini", "--out", out])
    if code == 0:
        print(open(f"{out}/failures.csv").read())
    sys.exit(code)
