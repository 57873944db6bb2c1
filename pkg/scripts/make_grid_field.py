"""Write a sampled bump to scripts/data/bump_grid.maxf for configs/grid.ini."""

import argparse
from pathlib import Path

import numpy as np

from maxop.fields import Bump, write_maxf

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(HERE / "data" / "bump_grid.maxf"))
    ap.add_argument("--radius", type=float, default=1.5)
    ap.add_argument("--spacing", type=float, default=0.025)
    args = ap.parse_args(argv)
    half = args.radius + 4 * args.spacing
    count = int(round(2 * half / args.spacing)) + 1
    axis = -half + args.spacing * np.arange(count)
    mesh = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    samples = Bump(dim=2, radius=args.radius)(mesh)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_maxf(args.out, samples, args.spacing, (-half, -half))
    print(f"wrote {args.out}: {count}x{count} samples, spacing {args.spacing}")


if __name__ == "__main__":
    main()
