"""Finite-difference check of every differentiable operation"""

import csv
import os

from ..common.errors import EXIT_NUMERICAL_ERROR, ConfigError
from ..common.log import log
from ..common.utils import ensure_directory
from ..tensor.gradcheck import registered_cases, run_suite
from .command_base import CommandBase
from .parameters import SEED

REPORT_HEADER = ("op", "cases", "max_rel_error", "tolerance", "seconds", "passed")

info = {
    "class_name": "GradcheckCommand",
    "command": "gradcheck",
    "section": "gradcheck",
    "description": (
        "Compare autodiff against central finite differences in f64 for every op and "
        "print the worst relative error per op. Exits 0 only if every op is under its tolerance."
    ),
    "config_parameters": [
        {"name": "trials", "type": "int", "default": 20, "description": "Random cases per op"},
        SEED,
        {"name": "ops", "type": "string", "description": "Comma separated op names (default: all)"},
        {"name": "out", "type": "path", "description": "Directory for gradcheck.csv"},
    ],
}


class GradcheckCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def selected_ops(self):
        text = self.get_config("ops")
        if not text:
            return None
        names = [name.strip() for name in text.split(",") if name.strip()]
        known = {case.name for case in registered_cases()}
        unknown = sorted(set(names) - known)
        if unknown:
            raise ConfigError(f"Unknown ops: {', '.join(unknown)}; known: {', '.join(sorted(known))}")
        return names

    def run(self):
        if self.get_config("trials") < 1:
            raise ValueError("trials must be at least 1")
        reports = run_suite(trials=self.get_config("trials"), seed=self.get_config("seed"), names=self.selected_ops())
        width = max(len(report.name) for report in reports)
        for report in reports:
            log.info(
                "%-*s  %3d cases  max rel error %.3e  (tolerance %.0e, %.2fs)  %s",
                width,
                report.name,
                report.cases,
                report.max_error,
                report.tolerance,
                report.seconds,
                "ok" if report.passed else "FAILED",
            )
        failed = [report.name for report in reports if not report.passed]

        out = self.get_config("out")
        if out:
            ensure_directory(out)
            with open(os.path.join(out, "gradcheck.csv"), "w", encoding="utf-8", newline="") as file:
                writer = csv.writer(file, lineterminator="\n")
                writer.writerow(REPORT_HEADER)
                for report in reports:
                    writer.writerow(
                        [report.name, report.cases, repr(report.max_error), report.tolerance, report.seconds, report.passed]
                    )
            self.write_resolved_config(out)

        if failed:
            log.error("%sGradient check failed for: %s", self.log_identifier, ", ".join(failed))
            return EXIT_NUMERICAL_ERROR
        log.info("%sAll %d ops passed", self.log_identifier, len(reports))
        return 0
