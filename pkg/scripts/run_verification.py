#!/usr/bin/env python3
"""Run the whole verification battery and print a one-line summary per check.

Covers: exact classical commutativity (principal, corner, shift-of-argument),
independence ranks, the numeric coordinate family, quantum centrality and
commutativity, the operator realization, chart canonicity, the contour form,
the action-angle pairing, and a conservation/linearization flow test.
"""

import argparse
import time

import numpy as np

from gztower.families import (
    FamilySpec,
    build_family,
    independence_rank,
    random_rational_matrix,
    verify_commutes,
    verify_trivial_numeric,
)
from gztower.orbits import (
    OrbitTangent,
    random_spectrum,
    residue_form_check,
    sample_orbit,
    verify_canonical_chart,
)
from gztower.poisson import random_canonical_point
from gztower.quantum import diffop_realization_check, verify_quantum_commutes
from gztower.tower import action_angle_bracket_table, linearization_check


def line(name, ok, extra=""):
    print(f"  [{'ok' if ok else 'FAIL'}] {name}" + (f"  ({extra})" if extra else ""))
    return ok


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=4,
                        help="largest ambient size for the exact classical checks")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    all_ok = True

    print("classical families (exact brackets)")
    for kind in ("gz-principal", "gz-corner"):
        for n in range(2, args.max_n + 1):
            t0 = time.monotonic()
            rep = verify_commutes(build_family(FamilySpec(kind, n, "both")))
            all_ok &= line(f"{kind} N={n}", rep.status == "ok",
                           f"{rep.pairs_checked} pairs, {time.monotonic()-t0:.2f}s")
    for trial in range(3):
        spec = FamilySpec("mf", 3, side="left", shift=random_rational_matrix(3, rng))
        rep = verify_commutes(build_family(spec))
        all_ok &= line(f"shift-of-argument N=3 trial {trial}", rep.status == "ok")

    print("independence and the coordinate family")
    for n in (2, 3):
        fam = build_family(FamilySpec("gz-principal", n, "both"))
        ranks = [independence_rank(fam, random_canonical_point(n, rng))
                 for _ in range(5)]
        all_ok &= line(f"rank N={n}", all(r == n * n for r in ranks), f"ranks {ranks}")
    triv = verify_trivial_numeric(3, pt_count=5, seed=args.seed)
    all_ok &= line("coordinate family u g^-1 (numeric)", triv.status == "ok",
                   f"max |bracket| {triv.max_abs_bracket:.1e}")

    print("quantum subalgebra")
    for n in (2, 3):
        rep = verify_quantum_commutes(n)
        all_ok &= line(f"quantum N={n}", rep.status == "ok",
                       f"convention {rep.convention}")
    drep = diffop_realization_check(3, trials=12, seed=args.seed)
    all_ok &= line("operator realization", drep.status == "ok")

    print("orbit geometry and the tower")
    pt = sample_orbit(random_spectrum(3, rng), seed=rng)
    crep = verify_canonical_chart(pt)
    all_ok &= line("canonical chart N=3", crep.status == "ok",
                   f"winner {crep.winner}, dev {crep.max_deviation:.1e}")
    pairs = [(OrbitTangent(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))),
              OrbitTangent(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))))
             for _ in range(10)]
    rrep = residue_form_check(pt, pairs)
    all_ok &= line("contour form N=3", rrep.status == "ok", f"winner {rrep.winner}")
    arep = action_angle_bracket_table(pt)
    all_ok &= line("action-angle pairing N=3", arep.status == "ok",
                   f"dev {arep.max_deviation_upper:.1e}")
    lrep = linearization_check(pt, (2, 1))
    all_ok &= line("flow linearization h[2,1]", lrep.status == "ok",
                   f"slope err {lrep.max_error:.1e}")

    print("all checks passed" if all_ok else "SOME CHECKS FAILED")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
