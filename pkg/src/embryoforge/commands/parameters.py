"""Config parameter declarations shared by several commands"""

from ..gan.config import LOSS_KINDS
from ..models.layers import CRITIC_NORMS

SEED = {"name": "seed", "type": "int", "default": 0, "description": "Master random seed"}
DTYPE = {
    "name": "dtype",
    "type": "string",
    "default": "f32",
    "choices": ["f32", "f64"],
    "description": "Floating point precision; f64 runs are bit-reproducible",
}
OUT = {"name": "out", "type": "path", "required": True, "description": "Output directory"}

TRAIN_PARAMETERS = {
    param["name"]: param
    for param in [
        {"name": "batch_size", "type": "int", "default": 32, "description": "Batch size"},
        {"name": "iterations", "type": "int", "default": 3000, "description": "Generator updates"},
        {"name": "epochs", "type": "int", "default": 30, "description": "Classifier epochs"},
        {"name": "lr_classifier", "type": "float", "default": 1e-5, "description": "Classifier learning rate"},
        {"name": "lr_gan", "type": "float", "default": 1e-4, "description": "GAN learning rate"},
        {
            "name": "betas_classifier",
            "type": "float_list",
            "default": [0.9, 0.999],
            "description": "Adam betas of the classifier",
        },
        {"name": "betas_gan", "type": "float_list", "default": [0.0, 0.9], "description": "Adam betas of the GAN"},
        {"name": "n_critic", "type": "int", "default": 5, "description": "Critic updates per generator update"},
        {"name": "penalty_weight", "type": "float", "default": 10.0, "description": "Gradient penalty weight"},
        {"name": "latent_dim", "type": "int", "default": 128, "description": "Generator latent size"},
        {
            "name": "loss_kind",
            "type": "string",
            "default": "wgan_gp",
            "choices": list(LOSS_KINDS),
            "description": "Adversarial objective",
        },
        {
            "name": "saturating_generator",
            "type": "bool",
            "default": False,
            "description": "Use the literal log(1 - D(G(z))) generator loss for minimax",
        },
        {"name": "dropout_rate", "type": "float", "default": 0.5, "description": "Classifier dropout rate"},
        {"name": "augment", "type": "bool", "default": True, "description": "Augment classifier batches"},
        {"name": "flip_vertical", "type": "bool", "default": True, "description": "Random vertical flips"},
        {"name": "flip_horizontal", "type": "bool", "default": True, "description": "Random horizontal flips"},
        {
            "name": "brightness_delta",
            "type": "float",
            "default": 0.1,
            "description": "Brightness jitter as a fraction of the intensity range",
        },
        {"name": "contrast_delta", "type": "float", "default": 0.2, "description": "Contrast jitter"},
        {"name": "sample_every", "type": "int", "default": 500, "description": "Iterations between sample grids"},
        {"name": "sample_grid", "type": "int", "default": 8, "description": "Sample grid side"},
        {
            "name": "checkpoint_every",
            "type": "int",
            "default": 500,
            "description": "Iterations between retained checkpoints",
        },
        {"name": "log_every", "type": "int", "default": 100, "description": "Iterations between log lines"},
    ]
}

NETWORK_PARAMETERS = {
    param["name"]: param
    for param in [
        {"name": "base_filters", "type": "int", "default": 32, "description": "Channels of the first conv layer"},
        {"name": "width_scale", "type": "float", "default": 1.0, "description": "Multiplier on every layer width"},
        {
            "name": "critic_norm",
            "type": "string",
            "default": "none",
            "choices": list(CRITIC_NORMS),
            "description": "Normalization inside the critic",
        },
        {"name": "hidden_units", "type": "int", "default": 1024, "description": "Units of the hidden dense layer"},
    ]
}


def train_parameters(*names):
    return [dict(TRAIN_PARAMETERS[name]) for name in names]


def network_parameters(*names):
    return [dict(NETWORK_PARAMETERS[name]) for name in names or NETWORK_PARAMETERS]
