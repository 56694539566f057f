"""Run the exhaustive certificates and summarize where the closed-form bound is loose."""

import argparse
import json

from neyman_sharp.oracle import certify_exact_moments, certify_inclusion_exclusion, certify_sharpness


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--tables", type=int, default=100)
    args = p.parse_args()
    for cert in (certify_sharpness(args.n), certify_exact_moments(args.tables), certify_inclusion_exclusion()):
        print(f"{'PASS' if cert.passed else 'FAIL'} {cert.name}: {json.dumps(cert.details)}")


if __name__ == "__main__":
    main()
