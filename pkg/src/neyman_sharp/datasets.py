"""Built-in data: two clinical 2x2 trials, the 16-unit illustration table and
the 18 latent-normal science tables with their published summary columns."""

from __future__ import annotations

from dataclasses import dataclass, field

from .estimators import ObservedSummary
from .outcomes import JointDistribution, PotentialOutcomeTable


@dataclass(frozen=True)
class Dataset:
    id: str
    description: str
    factors: tuple[str, str]
    arms: tuple[str, str, str, str]
    arm_sizes: tuple[int, int, int, int]
    successes: tuple[int, int, int, int]
    focus_effect: int
    provenance: dict = field(default_factory=dict)

    def summary(self) -> ObservedSummary:
        return ObservedSummary(self.arm_sizes, self.successes)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "factors": list(self.factors),
            "arms": list(self.arms),
            "n": list(self.arm_sizes),
            "n_obs": list(self.successes),
            "focus_effect": self.focus_effect,
            "provenance": self.provenance,
        }


def solve_cabg_counts(
    first_two: int = 103, last_two: int = 85, second_and_fourth: int = 89, fourth: int = 68
) -> tuple[int, int, int, int]:
    """Recover per-arm event counts from the published margins.

    The trial reports n1+n2, n3+n4, n2+n4 and n4; back-substitution gives the
    four arm counts.
    """
    n4 = fourth
    n2 = second_and_fourth - n4
    n3 = last_two - n4
    n1 = first_two - n2
    return (n1, n2, n3, n4)


SMOKING = Dataset(
    id="smoking-2006",
    description=(
        "Nicotine gum x counseling among African American light smokers; "
        "outcome is cotinine-verified abstinence at week 26."
    ),
    factors=("nicotine gum (placebo -1, 2mg/day +1)", "counseling (motivational interviewing -1, health education +1)"),
    arms=(
        "placebo + motivational interviewing",
        "placebo + health education",
        "nicotine gum + motivational interviewing",
        "nicotine gum + health education",
    ),
    arm_sizes=(189, 188, 189, 189),
    successes=(13, 29, 19, 34),
    focus_effect=2,
    provenance={
        "source": "Ahluwalia et al. (2006), Archives of Internal Medicine",
        "sign_note": (
            "With health education at the +1 level the counseling effect is +0.082; "
            "coding motivational interviewing as +1 (arm order 2,1,4,3) gives -0.082."
        ),
    },
)

CABG = Dataset(
    id="post-cabg-1997",
    description=(
        "Aggressive vs moderate LDL lowering x low-dose warfarin vs placebo after "
        "saphenous-vein bypass grafting; outcome is the four-year composite end point."
    ),
    factors=("LDL lowering (moderate -1, aggressive +1)", "anticoagulation (placebo -1, warfarin +1)"),
    arms=(
        "moderate LDL + placebo",
        "moderate LDL + warfarin",
        "aggressive LDL + placebo",
        "aggressive LDL + warfarin",
    ),
    arm_sizes=(337, 337, 339, 337),
    successes=solve_cabg_counts(),
    focus_effect=3,
    provenance={
        "source": "Post Coronary Artery Bypass Graft Trial Investigators (1997), NEJM",
        "derivation": "n1+n2=103, n3+n4=85, n2+n4=89, n4=68 => (82, 21, 17, 68)",
    },
)

BUILTIN = {d.id: d for d in (SMOKING, CABG)}


def get_dataset(dataset_id: str) -> Dataset:
    try:
        return BUILTIN[dataset_id]
    except KeyError:
        raise KeyError(f"unknown dataset {dataset_id!r}; choose from {sorted(BUILTIN)}") from None


#: Hypothetical 16-unit science table used to illustrate over-estimation.
ILLUSTRATION_ROWS = (
    (1, 1, 1, 0),
    (0, 0, 1, 1),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (0, 1, 0, 0),
    (1, 0, 0, 1),
    (0, 1, 0, 0),
    (1, 1, 0, 1),
    (0, 1, 1, 0),
    (0, 0, 1, 1),
    (1, 1, 0, 0),
    (1, 0, 0, 0),
    (0, 1, 0, 1),
    (0, 0, 0, 0),
    (1, 1, 1, 0),
    (1, 0, 1, 1),
)


def illustration_table() -> PotentialOutcomeTable:
    return PotentialOutcomeTable.from_rows(ILLUSTRATION_ROWS)


@dataclass(frozen=True)
class LatentCase:
    """One realized latent-normal science table and its published columns.

    ``published`` keys: tau, s2_tau, s2_lb (3 decimals), voe_classic and
    voe_improved (percent), len_classic, len_improved, cover_classic,
    cover_improved.
    """

    case: int
    rho: str
    mu: tuple[float, float, float, float]
    counts: tuple[int, ...]
    published: dict

    @property
    def id(self) -> str:
        return f"case{self.case}-rho{self.rho}"

    def joint(self) -> JointDistribution:
        return JointDistribution(self.counts)


_MU = {
    1: (-2.0, -2.0, -2.0, -2.0),
    2: (0.0, 0.0, 0.0, 0.0),
    3: (0.0, 0.0, 0.0, 2.0),
    4: (-2.0, -2.0, 0.0, -2.0),
    5: (-2.0, -2.0, -2.0, 2.0),
    6: (-2.0, 0.0, 0.0, 2.0),
}

_COLS = ("tau", "s2_tau", "s2_lb", "voe_classic", "voe_improved",
         "len_classic", "len_improved", "cover_classic", "cover_improved")

# fmt: off
_LATENT_ROWS = [
    (1, "-1/3", (723, 14, 21, 1, 20, 0, 0, 0, 21, 0, 0, 0, 0, 0, 0, 0), (-0.003, 0.025, 0.001, 34.7, 29.2, 0.022, 0.021, 0.977, 0.969)),
    (1, "0", (726, 18, 15, 1, 19, 0, 1, 0, 19, 0, 1, 0, 0, 0, 0, 0), (-0.002, 0.023, 0.001, 31.3, 25.9, 0.022, 0.021, 0.975, 0.966)),
    (1, "1/2", (740, 10, 16, 0, 8, 1, 1, 1, 9, 4, 3, 0, 3, 0, 3, 1), (0.001, 0.018, 0.000, 21.7, 16.9, 0.022, 0.022, 0.972, 0.961)),
    (2, "-1/3", (0, 29, 29, 93, 35, 79, 68, 28, 44, 96, 93, 36, 82, 42, 46, 0), (-0.014, 0.309, 0.007, 44.9, 43.1, 0.071, 0.070, 0.979, 0.977)),
    (2, "0", (44, 61, 43, 52, 48, 46, 47, 59, 44, 46, 55, 51, 46, 56, 52, 50), (0.016, 0.252, 0.008, 33.7, 31.9, 0.071, 0.070, 0.979, 0.972)),
    (2, "1/2", (182, 41, 42, 23, 41, 27, 30, 34, 33, 22, 24, 39, 26, 40, 38, 158), (-0.001, 0.158, 0.001, 18.7, 17.3, 0.071, 0.070, 0.965, 0.958)),
    (3, "-1/3", (0, 34, 0, 117, 0, 143, 1, 116, 0, 110, 5, 113, 4, 117, 7, 33), (0.228, 0.220, 0.062, 40.0, 28.8, 0.062, 0.060, 0.975, 0.970)),
    (3, "0", (2, 118, 2, 91, 5, 95, 4, 77, 4, 97, 1, 112, 0, 100, 0, 92), (0.239, 0.188, 0.062, 32.1, 21.6, 0.062, 0.060, 0.976, 0.970)),
    (3, "1/2", (20, 177, 3, 66, 0, 68, 0, 75, 2, 61, 0, 60, 0, 62, 0, 206), (0.239, 0.144, 0.062, 22.6, 12.9, 0.062, 0.060, 0.970, 0.964)),
    (4, "-1/3", (340, 19, 386, 6, 14, 0, 7, 0, 23, 0, 5, 0, 0, 0, 0, 0), (0.237, 0.089, 0.062, 35.5, 10.7, 0.041, 0.037, 0.978, 0.960)),
    (4, "0", (371, 6, 381, 11, 9, 1, 5, 0, 10, 0, 6, 0, 0, 0, 0, 0), (0.244, 0.081, 0.062, 35.4, 8.2, 0.039, 0.035, 0.976, 0.958)),
    (4, "1/2", (424, 2, 331, 13, 4, 0, 10, 1, 1, 0, 10, 0, 0, 0, 3, 1), (0.220, 0.075, 0.062, 31.6, 5.6, 0.039, 0.035, 0.974, 0.956)),
    (5, "-1/3", (15, 734, 0, 13, 3, 18, 0, 0, 2, 15, 0, 0, 0, 0, 0, 0), (0.472, 0.025, 0.013, 38.0, 16.9, 0.021, 0.019, 0.977, 0.965)),
    (5, "0", (20, 719, 0, 23, 2, 20, 0, 0, 0, 16, 0, 0, 0, 0, 0, 0), (0.477, 0.027, 0.011, 34.8, 20.1, 0.022, 0.021, 0.976, 0.966)),
    (5, "1/2", (19, 713, 0, 20, 0, 17, 0, 2, 0, 18, 0, 4, 0, 6, 0, 1), (0.471, 0.030, 0.014, 31.9, 16.9, 0.025, 0.023, 0.977, 0.967)),
    (6, "-1/3", (0, 148, 4, 234, 3, 242, 14, 140, 0, 10, 2, 0, 0, 2, 1, 0), (0.471, 0.164, 0.014, 42.6, 39.0, 0.052, 0.052, 0.982, 0.980)),
    (6, "0", (5, 196, 6, 194, 3, 188, 1, 194, 0, 3, 0, 2, 1, 5, 0, 2), (0.485, 0.136, 0.007, 33.8, 31.7, 0.052, 0.051, 0.977, 0.974)),
    (6, "1/2", (16, 266, 1, 129, 0, 126, 0, 247, 0, 0, 0, 2, 0, 4, 0, 9), (0.481, 0.092, 0.009, 20.7, 18.4, 0.052, 0.051, 0.968, 0.966)),
]
# fmt: on

LATENT_CASES = tuple(
    LatentCase(case, rho, _MU[case], counts, dict(zip(_COLS, vals)))
    for case, rho, counts, vals in _LATENT_ROWS
)

RHO_VALUES = {"-1/3": -1.0 / 3.0, "0": 0.0, "1/2": 0.5}
