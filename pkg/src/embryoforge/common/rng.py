"""Named, seeded random streams.

All randomness in a run flows from one master seed. Each purpose (data order,
augmentation, dropout, latent draws, interpolation epsilon, initialization) gets
its own stream so that switching one feature on or off never shifts the numbers
another feature sees."""

import numpy as np

STREAM_NAMES = ("init", "data_order", "augment", "dropout", "latent", "epsilon")


def derive_seed(master_seed, *keys):
    """Derive a 64-bit integer seed from a master seed and integer keys"""
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


class RngStreams:
    """Expand a master seed into named numpy Generators"""

    def __init__(self, seed):
        self.seed = int(seed)
        self.streams = {}

    def _stream_index(self, name):
        if name not in STREAM_NAMES:
            raise ValueError(f"Unknown random stream '{name}'. Known: {', '.join(STREAM_NAMES)}")
        return STREAM_NAMES.index(name)

    def stream(self, name):
        """Return the persistent generator for a stream, creating it on first use"""
        if name not in self.streams:
            sequence = np.random.SeedSequence(self.seed, spawn_key=(self._stream_index(name),))
            self.streams[name] = np.random.Generator(np.random.PCG64(sequence))
        return self.streams[name]

    def for_step(self, name, step):
        """A fresh generator that depends only on (seed, stream, step).

        Background threads use these so that how far ahead they run has no
        effect on the values drawn."""
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(self._stream_index(name), 1 << 20, int(step))
        )
        return np.random.Generator(np.random.PCG64(sequence))

    def get_state(self):
        # Materialize every stream so the captured state is complete
        return {name: self.stream(name).bit_generator.state for name in STREAM_NAMES}

    def set_state(self, states):
        for name, state in states.items():
            self.stream(name).bit_generator.state = state
