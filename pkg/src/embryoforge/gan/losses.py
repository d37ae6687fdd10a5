"""Adversarial objectives and the gradient penalty"""

import numpy as np

from ..common.errors import BatchCouplingError, DimensionError, NumericalError
from ..tensor import Tensor, backward, ops

EPSILON = 1e-7
# Keeps the norm differentiable where the input gradient vanishes
NORM_EPSILON = 1e-16


def _check_finite(*tensors):
    for t in tensors:
        if not np.all(np.isfinite(t.data)):
            raise NumericalError("Non-finite discriminator scores")


def _check_probabilities(t, what):
    if np.any(t.data < -EPSILON) or np.any(t.data > 1.0 + EPSILON):
        raise ValueError(
            f"{what} must be probabilities in (0, 1); got range "
            f"[{t.data.min():.4g}, {t.data.max():.4g}]. Is the sigmoid output missing?"
        )


def _clamped(t):
    return ops.clip(t, EPSILON, 1.0 - EPSILON)


def minimax_objective(d_real, d_fake):
    """mean(log D(x)) + mean(log(1 - D(G(z)))), the value the discriminator maximizes"""
    _check_finite(d_real, d_fake)
    _check_probabilities(d_real, "d_real")
    _check_probabilities(d_fake, "d_fake")
    return ops.add(ops.mean(ops.log(_clamped(d_real))), ops.mean(ops.log(1.0 - _clamped(d_fake))))


def minimax_loss(d_real, d_fake, saturating=False):
    """(discriminator loss, generator loss) for the minimax game.

    The generator loss is the non-saturating -mean(log D(G(z))); with
    ``saturating`` it is the literal mean(log(1 - D(G(z))))."""
    d_loss = ops.neg(minimax_objective(d_real, d_fake))
    return d_loss, minimax_generator_loss(d_fake, saturating)


def minimax_generator_loss(d_fake, saturating=False):
    _check_finite(d_fake)
    _check_probabilities(d_fake, "d_fake")
    fake = _clamped(d_fake)
    if saturating:
        return ops.mean(ops.log(1.0 - fake))
    return ops.neg(ops.mean(ops.log(fake)))


def wasserstein_estimate(d_real, d_fake):
    """mean(D(x)) - mean(D(G(z))) as a float"""
    real = d_real.data if isinstance(d_real, Tensor) else np.asarray(d_real)
    fake = d_fake.data if isinstance(d_fake, Tensor) else np.asarray(d_fake)
    return float(real.mean() - fake.mean())


def wasserstein_objective(d_real, d_fake, penalty=0.0):
    """(critic loss, generator loss): mean(fake) - mean(real) + penalty and -mean(fake)"""
    _check_finite(d_real, d_fake)
    critic_loss = ops.sub(ops.mean(d_fake), ops.mean(d_real))
    if isinstance(penalty, Tensor) or penalty != 0.0:
        critic_loss = ops.add(critic_loss, penalty)
    gen_loss = ops.neg(ops.mean(d_fake))
    return critic_loss, gen_loss


def _interpolate_gradients(critic, real, fake, rng, training, higher_order):
    real = real.data if isinstance(real, Tensor) else np.asarray(real)
    fake = fake.data if isinstance(fake, Tensor) else np.asarray(fake)
    if real.shape != fake.shape:
        raise DimensionError(f"Real and fake batches differ in shape: {real.shape} vs {fake.shape}")
    if training and critic.has_batch_norm:
        raise BatchCouplingError("per-sample penalty undefined under batch coupling")
    epsilon = rng.random((real.shape[0],) + (1,) * (real.ndim - 1))
    mixed = Tensor(epsilon * real + (1.0 - epsilon) * fake, requires_grad=True, dtype=critic.dtype)
    scores = critic.forward(mixed, training=training)
    # Samples do not interact, so d(sum of scores)/dx_n is the gradient of D(x_n) alone
    grads = backward(ops.sum(scores), [mixed], higher_order=higher_order)[mixed]
    axes = tuple(range(1, grads.ndim))
    return ops.sqrt(ops.add(ops.sum(ops.mul(grads, grads), axis=axes), NORM_EPSILON))


def gradient_penalty(critic, real, fake, lam, rng, training=True):
    """lam * mean_n (||grad_x D(x_hat_n)|| - 1)^2 at random interpolates x_hat.

    x_hat_n = e_n * real_n + (1 - e_n) * fake_n with e_n ~ U[0, 1]. The result
    is a graph node: differentiating it reaches the critic parameters
    through the input gradient (double backprop)."""
    if lam < 0:
        raise ValueError(f"Penalty weight must be >= 0, got {lam}")
    norms = _interpolate_gradients(critic, real, fake, rng, training, higher_order=True)
    deviation = ops.sub(norms, 1.0)
    return ops.mul(ops.mean(ops.mul(deviation, deviation)), float(lam))


def interpolate_gradient_norms(critic, real, fake, rng, training=False):
    """Per-sample input-gradient norms of the critic at random interpolates"""
    norms = _interpolate_gradients(critic, real, fake, rng, training, higher_order=False)
    return norms.data.copy()
