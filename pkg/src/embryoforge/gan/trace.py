"""Per-iteration loss records of a GAN run"""

import csv
import io
import math
from dataclasses import astuple, dataclass

import numpy as np

from ..common.errors import InputError, NumericalError

TRACE_HEADER = ("iter", "critic_obj", "gen_obj", "penalty", "wall_ms")


@dataclass(frozen=True)
class TraceRow:
    iter: int  # pylint: disable=redefined-builtin
    critic_obj: float
    gen_obj: float
    penalty: float
    wall_ms: float


class LossTrace:
    """Rows with strictly increasing ``iter`` and finite values.

    ``critic_obj`` is the Wasserstein estimate mean(D(x)) - mean(D(G(z)))
    for WGAN-GP runs and the discriminator loss for minimax runs."""

    def __init__(self, rows=None):
        self.rows = []
        for row in rows or []:
            self.append(*astuple(row))

    def append(self, iteration, critic_obj, gen_obj, penalty, wall_ms):
        values = (float(critic_obj), float(gen_obj), float(penalty), float(wall_ms))
        if not all(math.isfinite(v) for v in values):
            raise NumericalError(f"Non-finite loss at iteration {iteration}: {values[:3]}")
        if self.rows and iteration <= self.rows[-1].iter:
            raise ValueError(f"Trace iterations must increase: {iteration} after {self.rows[-1].iter}")
        row = TraceRow(int(iteration), *values)
        self.rows.append(row)
        return row

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, index):
        return self.rows[index]

    def column(self, name):
        if name not in TRACE_HEADER:
            raise KeyError(f"Unknown trace column '{name}'")
        return np.array([getattr(row, name) for row in self.rows])

    def moving_average(self, name, window):
        values = self.column(name)
        if len(values) < window:
            raise ValueError(f"Trace has {len(values)} rows, fewer than the window {window}")
        kernel = np.ones(window) / window
        return np.convolve(values, kernel, mode="valid")

    def dumps(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in self.rows:
            writer.writerow([row.iter] + [repr(v) for v in astuple(row)[1:]])
        return buffer.getvalue()

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write(self.dumps())

    @classmethod
    def from_csv(cls, path):
        try:
            with open(path, "r", encoding="utf-8", newline="") as file:
                reader = csv.reader(file)
                header = next(reader, None)
                if tuple(header or ()) != TRACE_HEADER:
                    raise InputError(f"{path}: expected header {','.join(TRACE_HEADER)}")
                trace = cls()
                for line in reader:
                    trace.append(int(line[0]), *(float(v) for v in line[1:5]))
                return trace
        except OSError as e:
            raise InputError(f"Cannot read trace {path}: {e.strerror}") from e
