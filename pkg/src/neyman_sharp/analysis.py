"""Trial-level analysis: resolve a data source, apply the arm coding, report all effects."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .contrasts import EFFECTS, check_effect
from .datasets import get_dataset
from .estimators import EffectReport, ObservedSummary, effect_report, normal_quantile

CSV_HEADER = ("unit_id", "arm", "outcome")


class DataError(ValueError):
    """Input data that cannot be analyzed (bad rows, tiny arms, bad coding)."""


def load_unit_csv(path: str | Path) -> ObservedSummary:
    """Summarize a unit-level ``unit_id,arm,outcome`` file (arm in 1..4, outcome in 0/1)."""
    n = [0, 0, 0, 0]
    s = [0, 0, 0, 0]
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise DataError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            uid, arm, outcome = (c.strip() for c in row)
            if uid in seen:
                raise DataError(f"{path}:{lineno}: duplicate unit_id {uid!r}")
            seen.add(uid)
            if arm not in ("1", "2", "3", "4"):
                raise DataError(f"{path}:{lineno}: arm must be 1..4, got {arm!r}")
            if outcome not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: outcome must be 0 or 1, got {outcome!r}")
            j = int(arm) - 1
            n[j] += 1
            s[j] += int(outcome)
    if any(v == 0 for v in n):
        raise DataError(f"{path}: every arm needs at least one unit, got sizes {n}")
    return ObservedSummary(tuple(n), tuple(s))


def write_unit_csv(path: str | Path, obs: ObservedSummary) -> None:
    """Expand a summary into a unit-level file (units ordered by arm, successes first)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        uid = 1
        for j, (nj, sj) in enumerate(zip(obs.arm_sizes, obs.successes)):
            for k in range(nj):
                w.writerow((uid, j + 1, 1 if k < sj else 0))
                uid += 1


def apply_coding(obs: ObservedSummary, coding: tuple[int, int, int, int]) -> ObservedSummary:
    """Reorder physical arms so that ``coding[k]`` (1-based) becomes z_{k+1}."""
    if sorted(coding) != [1, 2, 3, 4]:
        raise DataError(f"arm coding must be a permutation of 1..4, got {coding}")
    idx = [c - 1 for c in coding]
    return ObservedSummary(
        tuple(obs.arm_sizes[i] for i in idx), tuple(obs.successes[i] for i in idx)
    )


def _canonical_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class AnalysisRequest:
    """Exactly one of ``summary``, ``csv_path`` or ``dataset`` names the data."""

    summary: ObservedSummary | None = None
    csv_path: str | None = None
    dataset: str | None = None
    ci_level: float = 0.95
    coding: tuple[int, int, int, int] = (1, 2, 3, 4)
    effects: tuple[int, ...] = EFFECTS

    def __post_init__(self):
        given = [x is not None for x in (self.summary, self.csv_path, self.dataset)]
        if sum(given) != 1:
            raise ValueError("give exactly one data source: summary, csv_path or dataset")
        for l in self.effects:
            check_effect(l)
        normal_quantile(self.ci_level)

    def source(self) -> dict:
        if self.dataset is not None:
            return {"kind": "dataset", "id": self.dataset}
        if self.csv_path is not None:
            return {"kind": "csv", "path": str(self.csv_path)}
        return {"kind": "summary"}

    def resolve(self) -> ObservedSummary:
        if self.dataset is not None:
            obs = get_dataset(self.dataset).summary()
        elif self.csv_path is not None:
            obs = load_unit_csv(self.csv_path)
        else:
            obs = self.summary
        obs = apply_coding(obs, tuple(self.coding))
        if any(n < 2 for n in obs.arm_sizes):
            raise DataError(f"variance estimation needs at least 2 units per arm, got {obs.arm_sizes}")
        return obs


@dataclass(frozen=True)
class Report:
    inputs: dict
    effects: tuple[EffectReport, ...]
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "effects": [e.to_dict() for e in self.effects],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["inputs"], tuple(EffectReport.from_dict(e) for e in d["effects"]), d.get("provenance", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def effect(self, l: int) -> EffectReport:
        for e in self.effects:
            if e.effect == l:
                return e
        raise KeyError(l)


def analyze(request: AnalysisRequest) -> Report:
    obs = request.resolve()
    inputs = {
        "source": request.source(),
        "n": list(obs.arm_sizes),
        "n_obs": list(obs.successes),
        "coding": list(request.coding),
        "ci_level": request.ci_level,
        "effects": list(request.effects),
    }
    reports = tuple(effect_report(obs, l, request.ci_level) for l in request.effects)
    provenance = {"version": __version__, "seed": None, "config_hash": _canonical_hash(inputs)}
    return Report(inputs, reports, provenance)


def format_report(report: Report) -> str:
    """Human-readable table, 3 decimals (full precision stays in the JSON form)."""
    inp = report.inputs
    lines = [
        f"n = {tuple(inp['n'])}, n_obs = {tuple(inp['n_obs'])}, coding = {tuple(inp['coding'])}",
        f"{'effect':>6} {'estimate':>9} {'classic CI':>18} {'improved CI':>18} {'ratio':>7}",
    ]
    for e in report.effects:
        ratio = e.var_improved / e.var_classic if e.var_classic > 0 else 1.0
        lines.append(
            f"{e.effect:>6} {e.point:>9.3f} "
            f"{'(%.3f, %.3f)' % e.ci_classic:>18} {'(%.3f, %.3f)' % e.ci_improved:>18} "
            f"{100 * ratio:>6.1f}%"
        )
    return "\n".join(lines)
