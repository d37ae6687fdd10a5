"""Microscopy patch preprocessing, strided CNN classifiers and WGAN-GP data augmentation on numpy"""

__version__ = "0.1.0"
