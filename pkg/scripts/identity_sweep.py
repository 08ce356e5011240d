"""Randomized sweep over the variational identities.

    python3 scripts/identity_sweep.py --trials 500 --n-max 3 --s-max 2 --seed 1

For each random density it checks: EL of a divergence vanishes, Helmholtz
of an EL form vanishes, the linearized EL is self-adjoint, and the first
variation identity holds for a random projectable generator.
"""

import argparse
import random
import sys
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import make_context, random_generator, random_poly  # noqa: E402

from jetvar.jetcalc import divergence  # noqa: E402
from jetvar.variational import (euler_lagrange, first_variation_residual, formal_adjoint,  # noqa: E402
                                helmholtz, linearize)


@dataclass
class Sweep:
    trials: int = 200
    n_max: int = 3
    s_max: int = 2
    terms: int = 6
    seed: int = 1


def one(rng: random.Random, cfg: Sweep) -> dict:
    n = rng.randint(1, cfg.n_max)
    s = rng.randint(1, cfg.s_max)
    ctx = make_context(n, s, rng.randint(1, 2))
    L = random_poly(rng, ctx, s, cfg.terms)
    f = [random_poly(rng, ctx, s - 1, cfg.terms) for _ in range(n)]
    E = euler_lagrange(L, ctx)
    K = linearize(E, ctx)
    return {
        "divergence annihilated": not any(v.terms for v in euler_lagrange(divergence(f, ctx), ctx).values()),
        "helmholtz zero": helmholtz(E, ctx).is_zero(),
        "self-adjoint": formal_adjoint(K, ctx) == K,
        "first variation": first_variation_residual(L, random_generator(rng, ctx), ctx).is_zero(),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=Sweep.trials)
    ap.add_argument("--n-max", type=int, default=Sweep.n_max)
    ap.add_argument("--s-max", type=int, default=Sweep.s_max)
    ap.add_argument("--terms", type=int, default=Sweep.terms)
    ap.add_argument("--seed", type=int, default=Sweep.seed)
    a = ap.parse_args()
    cfg = Sweep(a.trials, a.n_max, a.s_max, a.terms, a.seed)
    rng = random.Random(cfg.seed)
    passed = Counter()
    t0 = time.perf_counter()
    for _ in range(cfg.trials):
        for k, v in one(rng, cfg).items():
            passed[k] += bool(v)
    dt = time.perf_counter() - t0
    print(f"{cfg}")
    for k in ("divergence annihilated", "helmholtz zero", "self-adjoint", "first variation"):
        print(f"  {k:24s} {passed[k]}/{cfg.trials}")
    print(f"  {dt:.1f}s")
    return 0 if all(v == cfg.trials for v in passed.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
