"""Re-analyze the two built-in clinical trials."""

import argparse

from neyman_sharp.analysis import AnalysisRequest, analyze, format_report
from neyman_sharp.datasets import BUILTIN


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ci-level", type=float, default=0.95)
    args = p.parse_args()
    for d in BUILTIN.values():
        print(f"== {d.id} (focus effect {d.focus_effect})")
        print(format_report(analyze(AnalysisRequest(dataset=d.id, ci_level=args.ci_level))))
        if "sign_note" in d.provenance:
            print("note:", d.provenance["sign_note"])
        print()


if __name__ == "__main__":
    main()
