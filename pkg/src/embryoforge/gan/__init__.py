"""Adversarial objectives and the training loops"""

from .config import LOSS_KINDS, TrainConfig
from .losses import (
    EPSILON,
    gradient_penalty,
    interpolate_gradient_norms,
    minimax_generator_loss,
    minimax_loss,
    minimax_objective,
    wasserstein_estimate,
    wasserstein_objective,
)
from .trace import TRACE_HEADER, LossTrace, TraceRow
from .toy import GaussianData, build_toy_networks, gaussian_samples, toy_train_config
from .train_gan import GanResult, GanTrainer, generate_images, sample_latent, train_gan
from .train_classifier import ClassifierResult, EpochStats, accuracy, predict_logits, train_classifier
from .overfit import OverfitReport, overfit_demo
