"""Side-by-side comparison of evaluation CSVs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .runner import read_csv

METRICS = ("reward", "delivery_rate", "cost_bits", "max_u_mean")

# (metric, left, relation, right, hard)
EXPECTED_ORDERINGS = (
    ("reward", "a2c", ">", "random", True),
    ("reward", "a2c", ">", "standard", True),
    ("max_u_mean", "a2c", "<", "random", True),
    ("max_u_mean", "a2c", "<", "standard", True),
    ("delivery_rate", "standard", ">=", "a2c", False),
    ("delivery_rate", "a2c", ">", "random", False),
    ("cost_bits", "a2c", "<", "standard", False),
)


@dataclass
class OrderingCheck:
    metric: str
    left: str
    relation: str
    right: str
    hard: bool
    margin: float
    status: str  # pass | fail | tie

    def describe(self) -> str:
        kind = "hard" if self.hard else "soft"
        return (f"{self.metric}: {self.left} {self.relation} {self.right} "
                f"[{kind}] {self.status.upper()} (margin {self.margin:+.6g})")


@dataclass
class Comparison:
    rows: dict  # label -> metric -> (mean, std, n)
    orderings: list

    def table(self) -> str:
        header = ["policy", "n"] + list(METRICS)
        lines = [header]
        for label, stats in self.rows.items():
            n = next(iter(stats.values()))[2]
            lines.append([label, str(n)] + [f"{stats[m][0]:.6g} ± {stats[m][1]:.3g}" for m in METRICS])
        widths = [max(len(r[i]) for r in lines) for i in range(len(header))]
        out = ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in lines]
        if self.orderings:
            out.append("")
            out.extend(o.describe() for o in self.orderings)
        return "\n".join(out)

    @property
    def hard_failures(self) -> list:
        return [o for o in self.orderings if o.hard and o.status == "fail"]


def _check(stats, metric, left, rel, right, hard) -> OrderingCheck:
    lv, rv = stats[left][metric][0], stats[right][metric][0]
    margin = lv - rv
    if lv == rv:
        status = "tie"
    else:
        ok = {">": lv > rv, "<": lv < rv, ">=": lv >= rv}[rel]
        status = "pass" if ok else "fail"
    return OrderingCheck(metric, left, rel, right, hard, float(margin), status)


def compare(csv_paths, labels=None) -> Comparison:
    """Aggregate per-policy means and check the expected orderings.

    Policies are labelled by their ``policy`` column, or by file stem when
    two inputs share a label.
    """
    tables = [read_csv(p) for p in csv_paths]
    if labels is None:
        labels = [str(t[0]["policy"]) if t and "policy" in t[0] else Path(p).stem
                  for t, p in zip(tables, csv_paths)]
        if len(set(labels)) != len(labels):
            labels = [Path(p).stem for p in csv_paths]
    stats = {}
    for label, rows in zip(labels, tables):
        stats[label] = {}
        for m in METRICS:
            vals = np.array([float(r[m]) for r in rows])
            stats[label][m] = (float(vals.mean()), float(vals.std()), len(vals))
    orderings = [
        _check(stats, *spec)
        for spec in EXPECTED_ORDERINGS
        if spec[1] in stats and spec[3] in stats
    ]
    return Comparison(stats, orderings)
