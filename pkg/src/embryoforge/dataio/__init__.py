"""File formats, synthetic data and batch loading"""

from .pgm import decode_pgm, encode_pgm, read_pgm, write_pgm
from .montage import montage, write_montage
from .manifest import ManifestEntry, dumps_manifest, read_manifest, resolve_path, write_manifest
from .checkpoint import (
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    network_checkpoint,
    restore_network,
    restore_optimizer,
    save_checkpoint,
)
from .patchset import PatchSet, load_patch_set, write_patch_set
from .synth import (
    image_to_stack,
    stack_to_image,
    synth_corpus,
    synth_labeled_patches,
    synth_stack,
)
from .loader import BatchPlan, PrefetchLoader
