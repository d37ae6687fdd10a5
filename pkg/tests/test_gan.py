"""Tests for the adversarial objectives, the gradient penalty and the loss trace"""

import sys

import numpy as np
import pytest

sys.path.append("src")

from utils_for_test_files import small_net_config  # pylint: disable=wrong-import-position

from embryoforge.common.errors import (  # pylint: disable=wrong-import-position
    BatchCouplingError,
    ConfigError,
    DimensionError,
    InputError,
    NumericalError,
)
from embryoforge.gan.config import TrainConfig  # pylint: disable=wrong-import-position
from embryoforge.gan.losses import (  # pylint: disable=wrong-import-position
    gradient_penalty,
    interpolate_gradient_norms,
    minimax_loss,
    minimax_objective,
    wasserstein_estimate,
    wasserstein_objective,
)
from embryoforge.gan.trace import LossTrace  # pylint: disable=wrong-import-position
from embryoforge.models.builders import build_critic, build_mlp_critic  # pylint: disable=wrong-import-position
from embryoforge.tensor import Tensor, backward  # pylint: disable=wrong-import-position


def scores(values):
    return Tensor(np.asarray(values, dtype=np.float64).reshape(-1, 1), requires_grad=True, dtype="f64")


def linear_critic(weight):
    """A single dense layer D(x) = x . w + b with a chosen weight"""
    weight = np.asarray(weight, dtype=np.float64)
    critic = build_mlp_critic(weight.shape[0], np.random.default_rng(0), hidden=(), dtype="f64")
    critic.params["fc1.weight"].data = weight
    return critic


def test_minimax_at_equilibrium():
    """A discriminator that answers 0.5 everywhere scores -2 log 2"""
    value = minimax_objective(scores([0.5, 0.5]), scores([0.5, 0.5, 0.5])).item()
    assert value == pytest.approx(-2.0 * np.log(2.0), abs=1e-12)


def test_minimax_clamps_certain_answers():
    """Scores of exactly 0 and 1 stay finite"""
    d_loss, g_loss = minimax_loss(scores([1.0, 0.0]), scores([0.0, 1.0]))
    assert np.isfinite(d_loss.item())
    assert np.isfinite(g_loss.item())


def test_minimax_rejects_raw_scores():
    """Values outside [0, 1] point at a missing sigmoid"""
    with pytest.raises(ValueError) as excinfo:
        minimax_objective(scores([3.0]), scores([0.5]))
    assert "sigmoid" in str(excinfo.value)


def test_saturating_generator_loss():
    _, non_saturating = minimax_loss(scores([0.5]), scores([0.25]))
    _, saturating = minimax_loss(scores([0.5]), scores([0.25]), saturating=True)
    assert non_saturating.item() == pytest.approx(-np.log(0.25))
    assert saturating.item() == pytest.approx(np.log(0.75))


def test_minimax_matches_per_sample_sums():
    rng = np.random.default_rng(4)
    real, fake = rng.uniform(0.05, 0.95, 7), rng.uniform(0.05, 0.95, 5)
    d_loss, g_loss = minimax_loss(scores(real), scores(fake))
    expected_d = -sum(np.log(r) for r in real) / len(real) - sum(np.log(1.0 - f) for f in fake) / len(fake)
    expected_g = -sum(np.log(f) for f in fake) / len(fake)
    assert d_loss.item() == pytest.approx(expected_d, abs=1e-12)
    assert g_loss.item() == pytest.approx(expected_g, abs=1e-12)


def test_wasserstein_objective():
    d_real, d_fake = scores([2.0, 4.0]), scores([1.0, 0.0])
    critic_loss, gen_loss = wasserstein_objective(d_real, d_fake, penalty=0.5)
    assert critic_loss.item() == pytest.approx(0.5 - 3.0 + 0.5)
    assert gen_loss.item() == pytest.approx(-0.5)
    assert wasserstein_estimate(d_real, d_fake) == pytest.approx(2.5)


def test_wasserstein_objective_ignores_a_common_offset():
    """Shifting every critic score by c changes neither the critic loss nor the generator gradient"""
    rng = np.random.default_rng(5)
    real, fake = rng.standard_normal(6), rng.standard_normal(6)
    base_fake, shifted_fake = scores(fake), scores(fake + 3.5)
    critic_loss, gen_loss = wasserstein_objective(scores(real), base_fake)
    shifted_loss, shifted_gen = wasserstein_objective(scores(real + 3.5), shifted_fake)
    assert shifted_loss.item() == pytest.approx(critic_loss.item(), abs=1e-12)
    np.testing.assert_allclose(
        backward(shifted_gen, [shifted_fake])[shifted_fake].data,
        backward(gen_loss, [base_fake])[base_fake].data,
        atol=1e-15,
    )


def test_non_finite_scores():
    with pytest.raises(NumericalError):
        wasserstein_objective(scores([np.nan]), scores([0.0]))


def test_penalty_zero_for_unit_gradient():
    """A linear critic with a unit-norm weight has no penalty"""
    critic = linear_critic([[1.0], [0.0]])
    rng = np.random.default_rng(0)
    real, fake = rng.standard_normal((8, 2)), rng.standard_normal((8, 2))
    assert gradient_penalty(critic, real, fake, 10.0, rng).item() == 0.0


def test_penalty_for_doubled_gradient():
    """||grad|| = 2 with weight 10 gives (2 - 1)^2 * 10 = 10"""
    critic = linear_critic([[2.0]])
    rng = np.random.default_rng(0)
    penalty = gradient_penalty(critic, rng.standard_normal((4, 1)), rng.standard_normal((4, 1)), 10.0, rng)
    assert penalty.item() == pytest.approx(10.0, abs=1e-12)


def test_penalty_reaches_critic_parameters():
    """d/dw of lam (|w| - 1)^2 at w = 2 is 2 lam (|w| - 1) = 20"""
    critic = linear_critic([[2.0]])
    rng = np.random.default_rng(0)
    penalty = gradient_penalty(critic, rng.standard_normal((4, 1)), rng.standard_normal((4, 1)), 10.0, rng)
    weight = critic.params["fc1.weight"]
    grad = backward(penalty, [weight])[weight]
    np.testing.assert_allclose(grad.data, [[20.0]], atol=1e-10)


def test_penalty_weight_zero_and_negative():
    critic = linear_critic([[2.0]])
    rng = np.random.default_rng(0)
    x = rng.standard_normal((4, 1))
    assert gradient_penalty(critic, x, x, 0.0, rng).item() == 0.0
    with pytest.raises(ValueError):
        gradient_penalty(critic, x, x, -1.0, rng)


def test_penalty_shape_mismatch():
    critic = linear_critic([[1.0], [1.0]])
    with pytest.raises(DimensionError):
        gradient_penalty(critic, np.zeros((4, 2)), np.zeros((3, 2)), 10.0, np.random.default_rng(0))


def test_penalty_refuses_batch_norm_in_training():
    """Batch statistics couple the samples, so the per-sample penalty is refused"""
    critic = build_critic(small_net_config(16, critic_norm="batch_norm"), np.random.default_rng(0), dtype="f64")
    x = np.zeros((4, 1, 16, 16))
    with pytest.raises(BatchCouplingError) as excinfo:
        gradient_penalty(critic, x, x, 10.0, np.random.default_rng(0))
    assert "batch coupling" in str(excinfo.value)
    # Eval mode uses running statistics and is allowed
    assert np.isfinite(gradient_penalty(critic, x, x, 10.0, np.random.default_rng(0), training=False).item())


def test_layer_norm_critic_penalty():
    """Layer norm works per sample, so the penalty is fine in training mode"""
    critic = build_critic(small_net_config(16, critic_norm="layer_norm"), np.random.default_rng(0), dtype="f64")
    rng = np.random.default_rng(1)
    real, fake = rng.standard_normal((3, 1, 16, 16)), rng.standard_normal((3, 1, 16, 16))
    penalty = gradient_penalty(critic, real, fake, 10.0, rng)
    grads = backward(penalty, critic.params.tensors())
    assert all(np.all(np.isfinite(g.data)) for g in grads.values())


def test_interpolate_gradient_norms():
    critic = linear_critic([[3.0], [4.0]])
    rng = np.random.default_rng(0)
    norms = interpolate_gradient_norms(critic, np.ones((5, 2)), np.zeros((5, 2)), rng)
    np.testing.assert_allclose(norms, np.full(5, 5.0))


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(n_critic=0)
    with pytest.raises(ConfigError):
        TrainConfig(penalty_weight=-1.0)
    with pytest.raises(ConfigError):
        TrainConfig(loss_kind="hinge")
    with pytest.raises(ConfigError):
        TrainConfig(betas_gan=(0.5, 1.0))
    assert TrainConfig().betas_gan == (0.0, 0.9)


def test_train_config_dict_roundtrip():
    cfg = TrainConfig(batch_size=16, betas_gan=[0.5, 0.99], augment=False)
    again = TrainConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.augment_config() is None
    assert cfg.replace(n_critic=2).n_critic == 2


def test_trace_rows_and_csv(tmp_path):
    """Rows must increase and be finite; the CSV keeps every value"""
    trace = LossTrace()
    trace.append(1, 0.5, -0.25, 0.1, 12.0)
    trace.append(2, 0.75, -0.5, 0.05, 11.0)
    with pytest.raises(ValueError):
        trace.append(2, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(NumericalError):
        trace.append(3, np.inf, 0.0, 0.0, 0.0)

    assert trace.dumps().splitlines()[0] == "iter,critic_obj,gen_obj,penalty,wall_ms"
    path = tmp_path / "trace.csv"
    trace.to_csv(str(path))
    again = LossTrace.from_csv(str(path))
    assert again.rows == trace.rows
    np.testing.assert_allclose(trace.moving_average("critic_obj", 2), [0.625])


def test_trace_csv_bad_header(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(InputError):
        LossTrace.from_csv(str(path))


def test_penalty_gradient_with_a_flat_critic():
    """A critic with zero input gradient still gives finite parameter gradients"""
    critic = build_mlp_critic(2, np.random.default_rng(0), hidden=(4,), dtype="f64")
    for _, param in critic.params:
        param.data = np.zeros_like(param.data)
    rng = np.random.default_rng(1)
    penalty = gradient_penalty(critic, rng.standard_normal((4, 2)), rng.standard_normal((4, 2)), 10.0, rng)
    assert penalty.item() == pytest.approx(10.0, rel=1e-5)
    grads = backward(penalty, critic.params.tensors())
    assert all(np.all(np.isfinite(g.data)) for g in grads.values())
