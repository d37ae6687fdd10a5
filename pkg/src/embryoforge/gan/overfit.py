"""Full-width versus reduced-width classifiers on a small training set.

With few training patches the full-width network memorizes them; the
experiment records whether halving every layer's width generalizes
better across several seeds."""

import csv
import os
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..common.log import log
from ..common.rng import derive_seed
from ..common.utils import ensure_directory
from ..dataio.synth import synth_labeled_patches
from ..models.layers import NetworkConfig
from .train_classifier import train_classifier

DEFAULT_SIZE = 32
REPORT_HEADER = ("width_scale", "seed", "train_accuracy", "test_accuracy")


@dataclass
class OverfitRow:
    width_scale: float
    seed: int
    train_accuracy: float
    test_accuracy: float


@dataclass
class WidthSummary:
    width_scale: float
    mean_test_accuracy: float
    std_test_accuracy: float
    mean_train_accuracy: float


@dataclass
class OverfitReport:
    rows: List[OverfitRow] = field(default_factory=list)
    summaries: List[WidthSummary] = field(default_factory=list)
    # Fraction of seeds where the narrowest network's test accuracy is >= the widest one's
    narrow_not_worse_fraction: float = 0.0

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(REPORT_HEADER)
            for row in self.rows:
                writer.writerow([row.width_scale, row.seed, repr(row.train_accuracy), repr(row.test_accuracy)])

    def table(self):
        lines = ["width  mean_test  std_test  mean_train"]
        for summary in self.summaries:
            lines.append(
                f"{summary.width_scale:<6} {summary.mean_test_accuracy:9.4f} "
                f"{summary.std_test_accuracy:9.4f} {summary.mean_train_accuracy:11.4f}"
            )
        lines.append(f"narrow >= wide in {self.narrow_not_worse_fraction:.0%} of seeds")
        return "\n".join(lines)


def overfit_demo(
    cfg,
    train_size=198,
    test_size=200,
    widths=(1.0, 0.5),
    seeds=10,
    net_cfg=None,
    data=None,
    out_dir=None,
):
    """Train every width once per seed on the same small synthetic split.

    ``data`` may supply a (train, test) pair of labeled PatchSets; otherwise
    a rosette corpus of ``train_size + test_size`` patches is synthesized
    from ``cfg.seed``."""
    log_identifier = "[embryoforge.overfit_demo] "
    if data is None:
        size = net_cfg.input_size if net_cfg else DEFAULT_SIZE
        rng = np.random.default_rng(derive_seed(cfg.seed, train_size))
        data = synth_labeled_patches(train_size + test_size, size, rng).split(train_size)
    train, test = data
    net_cfg = net_cfg or NetworkConfig(input_size=train.size, dropout_rate=cfg.dropout_rate)

    report = OverfitReport()
    for index in range(seeds):
        seed = cfg.seed + index
        for width in widths:
            width_cfg = NetworkConfig.from_dict(dict(net_cfg.to_dict(), width_scale=width))
            result = train_classifier(train, test, cfg.replace(seed=seed), net_cfg=width_cfg)
            final = result.history[-1] if result.history else None
            row = OverfitRow(
                width_scale=float(width),
                seed=seed,
                train_accuracy=final.train_accuracy if final else 0.0,
                test_accuracy=final.test_accuracy if final else 0.0,
            )
            report.rows.append(row)
            log.info(
                "%sSeed %d width %.2f: train %.3f test %.3f",
                log_identifier,
                seed,
                width,
                row.train_accuracy,
                row.test_accuracy,
            )

    for width in widths:
        rows = [row for row in report.rows if row.width_scale == float(width)]
        test_acc = np.array([row.test_accuracy for row in rows])
        report.summaries.append(
            WidthSummary(
                width_scale=float(width),
                mean_test_accuracy=float(test_acc.mean()) if len(rows) else 0.0,
                std_test_accuracy=float(test_acc.std()) if len(rows) else 0.0,
                mean_train_accuracy=float(np.mean([row.train_accuracy for row in rows])) if rows else 0.0,
            )
        )
    if seeds:
        wide, narrow = float(max(widths)), float(min(widths))
        by_seed = {}
        for row in report.rows:
            by_seed.setdefault(row.seed, {})[row.width_scale] = row.test_accuracy
        wins = sum(1 for accs in by_seed.values() if accs[narrow] >= accs[wide])
        report.narrow_not_worse_fraction = wins / len(by_seed)

    log.info("%sSummary\n%s", log_identifier, report.table())
    if out_dir:
        ensure_directory(out_dir)
        report.to_csv(os.path.join(out_dir, "overfit.csv"))
    return report
