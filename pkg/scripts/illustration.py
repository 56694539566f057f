"""Population quantities for the 16-unit illustration table under n = (4, 4, 4, 4)."""

from neyman_sharp.contrasts import EFFECTS
from neyman_sharp.datasets import illustration_table
from neyman_sharp.estimators import Design, arm_variances, expected_overestimation, population_effect, true_sampling_variance
from neyman_sharp.outcomes import s2_tau_from_counts, to_joint


def main():
    joint = to_joint(illustration_table())
    design = Design((4, 4, 4, 4))
    print("arm variances:", " ".join(f"{v:.4f}" for v in arm_variances(joint)))
    print(f"{'effect':>6} {'tau':>8} {'S2(tau)':>8} {'variance':>9} {'overest.':>9}")
    for l in EFFECTS:
        rel = expected_overestimation(joint, design, l)[1]
        print(
            f"{l:>6} {population_effect(joint.arm_means(), l):>8.4f} {s2_tau_from_counts(joint, l):>8.4f} "
            f"{true_sampling_variance(joint, design, l):>9.4f} {100 * rel:>8.2f}%"
        )


if __name__ == "__main__":
    main()
