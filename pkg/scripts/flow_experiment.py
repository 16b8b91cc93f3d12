#!/usr/bin/env python3
"""Integrate one action flow on a random orbit and write the trajectory.

Produces a JSON-lines file with one record per sample (time, matrix, action
values, branch-tracked angle values) plus a linearization summary on stdout:
the angle conjugate to the chosen action should advance with unit speed
while all other angles and every action stay put.
"""

import argparse
import json

import numpy as np

from gztower.orbits import random_spectrum, sample_orbit
from gztower.tower import linearization_check, trajectory_records


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--level", type=int, default=2, help="action level n")
    parser.add_argument("--k", type=int, default=1, help="action index k within the level")
    parser.add_argument("--t", type=float, default=1.0)
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="trajectory.jsonl")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    pt = sample_orbit(random_spectrum(args.n, rng), seed=rng)
    selector = (args.level, args.k)

    records = trajectory_records(pt, selector, t_final=args.t, steps=args.steps)
    with open(args.out, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(f"wrote {len(records)} samples to {args.out}")

    h0 = records[0]["h"]
    drift = max(abs(complex(*rec["h"][key]) - complex(*h0[key]))
                for rec in records for key in h0)
    print(f"max action drift over t in [0, {args.t}]: {drift:.2e}")

    lin = linearization_check(pt, selector)
    print(f"slopes over the short-time window (conjugate is tau[{args.level},{args.k}]):")
    for (n, k), slope in sorted(lin.slopes.items()):
        print(f"  tau[{n},{k}]: {slope.real:+.6f}{slope.imag:+.6f}j")
    print(f"linearization: {lin.status} (max slope error {lin.max_error:.2e})")
    return 0 if lin.status == "ok" else 1


if __name__ == "__main__":
    raise SystemExit(main())
