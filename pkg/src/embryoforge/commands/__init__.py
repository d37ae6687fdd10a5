"""Subcommands of the embryoforge executable, in the order they are listed"""

COMMAND_MODULES = [
    "synth",
    "preprocess",
    "train_gan",
    "train_classifier",
    "generate",
    "overfit_demo",
    "gradcheck",
]
