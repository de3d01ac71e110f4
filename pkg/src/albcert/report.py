"""Scan reports: deterministic JSON, delimited output, and rendered figures.

The JSON report splits into a deterministic "report" section (byte-identical
across replays of the same scan) and a "meta" section holding wall-clock
data; comparisons and checkpoints only ever look at the former.  The CSV
mirrors the per-pair outcomes, and the figure pair (outcome grid + tensor
count histogram) is rendered to files next to it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


@dataclass
class ScanReport:
    ranks: tuple[int, int]
    bound: int
    labels1: list[str] = field(default_factory=list)
    labels2: list[str] = field(default_factory=list)
    outcomes: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def tested(self) -> int:
        return len(self.outcomes)

    @property
    def certified(self) -> int:
        return sum(1 for o in self.outcomes if o["outcome"] == "certified")

    @property
    def undecided(self) -> int:
        return sum(1 for o in self.outcomes if o["outcome"] == "undecided")

    def check_invariants(self) -> None:
        assert self.tested == self.certified + self.undecided

    def report_dict(self) -> dict:
        return {
            "ranks": list(self.ranks),
            "bound": self.bound,
            "curves1": self.labels1,
            "curves2": self.labels2,
            "tested": self.tested,
            "certified": self.certified,
            "undecided": self.undecided,
            "outcomes": self.outcomes,
        }

    def to_json(self) -> str:
        return json.dumps(
            {"report": self.report_dict(), "meta": self.meta}, sort_keys=True, indent=1
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def from_json(cls, text: str) -> "ScanReport":
        doc = json.loads(text)
        rep = doc["report"]
        return cls(
            ranks=tuple(rep["ranks"]),
            bound=rep["bound"],
            labels1=rep["curves1"],
            labels2=rep["curves2"],
            outcomes=rep["outcomes"],
            meta=doc.get("meta", {}),
        )


def write_csv(report: ScanReport, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["curve1", "curve2", "outcome", "rule", "tensors_found",
             "tensors_needed", "points_seen", "certificate"]
        )
        for o in report.outcomes:
            w.writerow(
                [
                    o["pair"][0],
                    o["pair"][1],
                    o["outcome"],
                    o.get("rule", ""),
                    o.get("found", ""),
                    o.get("needed", ""),
                    o.get("points_seen", ""),
                    o.get("certificate_file", ""),
                ]
            )


def render_figures(report: ScanReport, outdir) -> list[str]:
    """Outcome grid and tensor-count histogram, written as PNG files."""
    import os

    paths = []
    labels1, labels2 = report.labels1, report.labels2
    sym = labels1 == labels2
    idx1 = {l: i for i, l in enumerate(labels1)}
    idx2 = {l: i for i, l in enumerate(labels2)}
    import numpy as np

    grid = np.full((len(labels1), len(labels2)), np.nan)
    for o in report.outcomes:
        a, b = o["pair"]
        val = 1.0 if o["outcome"] == "certified" else 0.0
        if a in idx1 and b in idx2:
            grid[idx1[a], idx2[b]] = val
        if sym and b in idx1 and a in idx2:
            grid[idx1[b], idx2[a]] = val

    fig, ax = plt.subplots(figsize=(7, 6))
    cmap = matplotlib.colors.ListedColormap(["#c0392b", "#27ae60"])
    ax.imshow(grid, cmap=cmap, vmin=0, vmax=1)
    ax.set_xticks(range(len(labels2)), labels2, rotation=90, fontsize=7)
    ax.set_yticks(range(len(labels1)), labels1, fontsize=7)
    ax.set_title(
        f"pair outcomes (ranks {report.ranks[0]}x{report.ranks[1]}, "
        f"bound {report.bound}): {report.certified}/{report.tested} certified"
    )
    fig.tight_layout()
    p1 = os.path.join(outdir, "scan_grid.png")
    fig.savefig(p1, dpi=150)
    plt.close(fig)
    paths.append(p1)

    fig, ax = plt.subplots(figsize=(6, 4))
    found = [o.get("found", 0) for o in report.outcomes]
    needed = report.ranks[0] * report.ranks[1]
    bins = np.arange(-0.5, needed + 1.5)
    ax.hist(found, bins=bins, color="#2980b9", edgecolor="black")
    ax.set_xlabel("independent tensors found")
    ax.set_ylabel("pairs")
    ax.set_title(f"tensor counts (target {needed})")
    fig.tight_layout()
    p2 = os.path.join(outdir, "scan_tensors.png")
    fig.savefig(p2, dpi=150)
    plt.close(fig)
    paths.append(p2)
    return paths
