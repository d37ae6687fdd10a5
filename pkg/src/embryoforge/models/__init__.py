"""Network layer specs and the classifier, critic and generator builders"""

from .layers import LayerSpec, NetworkConfig, infer_shapes
from .network import Network
from .builders import (
    DEFAULT_LATENT_DIM,
    build_classifier,
    build_critic,
    build_generator,
    build_mlp_critic,
    build_mlp_generator,
)
