"""Run every experiment config in scripts/configs and print the result tables."""

import sys
from pathlib import Path

from colloc_hum.cli import main

HERE = Path(__file__).resolve().parent

if __name__ == "__main__":
    status = 0
    for cfg in sorted((HERE / "configs").glob("*.cfg")):
        print(f"== {cfg.name}")
        rc = main(["--config", str(cfg)] + sys.argv[1:])
        status = max(status, rc)
        out = next(line.split("=", 1)[1].strip() for line in cfg.read_text().splitlines()
                   if line.startswith("out_dir"))
        for table in sorted(Path(out).glob("*.csv")):
            if table.name.startswith(("controls_N", "spectra_gaps", "exp3_profile")):
                continue
            print(f"-- {table}")
            print(table.read_text().rstrip())
    sys.exit(status)
