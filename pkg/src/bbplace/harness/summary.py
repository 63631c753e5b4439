"""Mean/std/rank tables over sets of traces."""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Cell:
    mean: float
    std: float
    n: int
    rank: int | None = None


@dataclass
class Summary:
    instances: list
    methods: list
    cells: dict = field(default_factory=dict)        # (instance, method) -> Cell
    average_rank: dict = field(default_factory=dict)  # method -> float

    def cell(self, instance, method):
        return self.cells.get((instance, method))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "method", "mean", "std", "n", "rank"])
        for inst in self.instances:
            for m in self.methods:
                c = self.cell(inst, m)
                if c is None:
                    w.writerow([inst, m, "", "", 0, ""])
                else:
                    w.writerow([inst, m, repr(c.mean), repr(c.std), c.n, c.rank])
        for m in self.methods:
            w.writerow(["average_rank", m, "", "", "", _fmt_rank(self.average_rank.get(m))])
        return buf.getvalue()

    def to_text(self) -> str:
        head = ["instance"] + list(self.methods)
        rows = []
        for inst in self.instances:
            row = [inst]
            for m in self.methods:
                c = self.cell(inst, m)
                row.append("missing" if c is None else f"{c.mean:.4g} +/- {c.std:.3g} ({c.rank})")
            rows.append(row)
        rows.append(["average rank"] + [_fmt_rank(self.average_rank.get(m)) for m in self.methods])
        widths = [max(len(str(r[i])) for r in [head] + rows) for i in range(len(head))]
        lines = ["  ".join(str(v).ljust(widths[i]) for i, v in enumerate(r)).rstrip()
                 for r in [head] + rows]
        return "\n".join(lines) + "\n"


def _fmt_rank(v):
    return "" if v is None else f"{v:.2f}"


def summarize(traces) -> Summary:
    """Final-fitness mean, sample std and per-instance ordinal rank for each method.

    Ranks order methods by mean (ties by method name) among those present
    on an instance; the average rank is taken over instances where the
    method is present.
    """
    groups = defaultdict(list)
    for t in traces:
        groups[(t.instance, t.method)].append(float(t.final_fitness))
    instances = sorted({k[0] for k in groups})
    methods = sorted({k[1] for k in groups})
    s = Summary(instances, methods)
    for key, vals in groups.items():
        v = np.asarray(vals)
        std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
        s.cells[key] = Cell(float(v.mean()), std, len(v))
    ranks = defaultdict(list)
    for inst in instances:
        present = [m for m in methods if (inst, m) in s.cells]
        present.sort(key=lambda m: (s.cells[(inst, m)].mean, m))
        for r, m in enumerate(present, 1):
            s.cells[(inst, m)].rank = r
            ranks[m].append(r)
    s.average_rank = {m: float(np.mean(r)) if r else math.nan for m, r in ranks.items()}
    return s
