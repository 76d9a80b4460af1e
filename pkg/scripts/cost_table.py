"""Shot cost of direct Pauli measurement vs the Hadamard test over a precision grid,
plus an empirical check of the two worst-case variance bounds on random states."""
import argparse

import numpy as np

from chiralqc import protocols as pr
from chiralqc.qstate import from_amplitudes, stream
from chiralqc.states import SiteTrio


def empirical_variance(n_states=10, reps=2000, shots=600, seed=0):
    rng = np.random.default_rng(seed)
    for i in range(n_states):
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        reg = from_amplitudes((2,) * 4, v)
        trio = SiteTrio(0, 1, 2)
        probs = pr.hadamard_probabilities(reg, trio, "Y")
        dists = pr.direct_distributions(reg, trio)
        g = stream(seed, i)
        h = [pr.chirality_from_hadamard(pr.sample_hadamard(probs, "Y", shots, g)).estimate for _ in range(reps)]
        d = [pr.direct_from_distributions(dists, shots, g).estimate for _ in range(reps)]
        print(f"state {i}: N*Var hadamard {shots * np.var(h):.3f} (<= 1.333)  direct {shots * np.var(d):.3f} (<= 3)")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.01])
    p.add_argument("--variance", action="store_true", help="also run the empirical variance check")
    args = p.parse_args()
    print(f"{'eps':>6} {'prep dir':>9} {'prep had':>9} {'meas dir':>9} {'meas had':>9} {'ratio p':>8} {'ratio m':>8}")
    for eps in args.eps:
        c = pr.cost_model(eps)
        print(f"{eps:>6} {c.direct_preps:>9} {c.hadamard_preps:>9} {c.direct_measurements:>9} "
              f"{c.hadamard_measurements:>9} {str(c.ratio_preps):>8} {str(c.ratio_measurements):>8}")
    if args.variance:
        empirical_variance()


if __name__ == "__main__":
    main()
