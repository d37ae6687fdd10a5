"""Builders for the classifier, the critic and the generator.

All three follow the DCGAN conventions: 4x4 kernels with stride 2 in place
of pooling, leaky ReLU activations, and no bias on a layer whose output is
normalized right away."""

from .layers import LayerSpec, NetworkConfig
from .network import Network

DEFAULT_LATENT_DIM = 128


def _conv_stack(cfg, norm):
    """Strided conv layers with channels base * 2^i; ``norm`` is none, batch_norm or layer_norm"""
    specs = []
    channels = cfg.in_channels
    for i in range(cfg.n_conv):
        index = i + 1
        out_channels = cfg.conv_channels(i)
        specs.append(
            LayerSpec(
                "conv",
                name=f"conv{index}",
                in_channels=channels,
                out_channels=out_channels,
                bias=norm == "none",
            )
        )
        if norm != "none":
            specs.append(LayerSpec(norm, name=f"norm{index}", channels=out_channels))
        specs.append(LayerSpec("leaky_relu", name=f"act{index}", slope=cfg.slope))
        channels = out_channels
    return specs, channels


def _head_features(cfg, channels):
    # Every strided conv halves the side: size / 2^n_conv = 4
    side = cfg.input_size >> cfg.n_conv
    return channels * side * side


def build_classifier(cfg, n_classes, rng, dtype="f32"):
    """n_conv conv blocks, then dense -> hidden (batch norm, leaky ReLU, dropout) -> logits"""
    if not isinstance(cfg, NetworkConfig):
        cfg = NetworkConfig.from_dict(cfg)
    if n_classes < 2:
        raise ValueError(f"A classifier needs at least 2 classes, got {n_classes}")
    specs, channels = _conv_stack(cfg, "batch_norm")
    hidden = cfg.hidden()
    specs += [
        LayerSpec("flatten", name="flatten"),
        LayerSpec("dense", name="fc1", in_features=_head_features(cfg, channels), out_features=hidden, bias=False),
        LayerSpec("batch_norm", name="norm_fc1", channels=hidden),
        LayerSpec("leaky_relu", name="act_fc1", slope=cfg.slope),
        LayerSpec("dropout", name="drop_fc1", rate=cfg.dropout_rate),
        LayerSpec("dense", name="fc2", in_features=hidden, out_features=n_classes),
    ]
    return Network(specs, (cfg.in_channels, cfg.input_size, cfg.input_size), rng=rng, dtype=dtype, kind="classifier")


def build_critic(cfg, rng, dtype="f32", output="linear"):
    """The classifier layout with a single unbounded score and no dropout.

    ``output="sigmoid"`` turns it into a probability-valued discriminator for
    the minimax objective."""
    if not isinstance(cfg, NetworkConfig):
        cfg = NetworkConfig.from_dict(cfg)
    if output not in ("linear", "sigmoid"):
        raise ValueError(f"Critic output must be 'linear' or 'sigmoid', got '{output}'")
    specs, channels = _conv_stack(cfg, cfg.critic_norm)
    hidden = cfg.hidden()
    norm = cfg.critic_norm
    specs += [
        LayerSpec("flatten", name="flatten"),
        LayerSpec("dense", name="fc1", in_features=_head_features(cfg, channels), out_features=hidden, bias=norm == "none"),
    ]
    if norm != "none":
        # layer_norm over a flat [N, F] activation normalizes every sample over its F features
        specs.append(LayerSpec(norm, name="norm_fc1", channels=hidden))
    specs += [
        LayerSpec("leaky_relu", name="act_fc1", slope=cfg.slope),
        LayerSpec("dense", name="fc2", in_features=hidden, out_features=1),
    ]
    if output == "sigmoid":
        specs.append(LayerSpec("sigmoid", name="prob"))
    return Network(specs, (cfg.in_channels, cfg.input_size, cfg.input_size), rng=rng, dtype=dtype, kind="critic")


def build_generator(latent_dim, cfg, rng, dtype="f32"):
    """Mirror of the critic: dense -> 4x4 map, then transposed convs up to input_size with a tanh output"""
    if not isinstance(cfg, NetworkConfig):
        cfg = NetworkConfig.from_dict(cfg)
    if not isinstance(latent_dim, int) or latent_dim < 1:
        raise ValueError(f"latent_dim must be a positive integer, got {latent_dim}")
    n = cfg.n_conv
    top = cfg.conv_channels(n - 1)
    specs = [
        LayerSpec("dense", name="fc0", in_features=latent_dim, out_features=top * 16, bias=False),
        LayerSpec("reshape", name="to_map", shape=(top, 4, 4)),
        LayerSpec("batch_norm", name="norm0", channels=top),
        LayerSpec("leaky_relu", name="act0", slope=cfg.slope),
    ]
    channels = top
    for i in range(1, n + 1):
        last = i == n
        out_channels = cfg.in_channels if last else cfg.conv_channels(n - 1 - i)
        specs.append(
            LayerSpec(
                "conv_transpose",
                name=f"deconv{i}",
                in_channels=channels,
                out_channels=out_channels,
                bias=last,
            )
        )
        if last:
            specs.append(LayerSpec("tanh", name="out"))
        else:
            specs.append(LayerSpec("batch_norm", name=f"norm{i}", channels=out_channels))
            specs.append(LayerSpec("leaky_relu", name=f"act{i}", slope=cfg.slope))
        channels = out_channels
    return Network(specs, (latent_dim,), rng=rng, dtype=dtype, kind="generator")


def _mlp(in_features, hidden, out_features, slope):
    specs = []
    features = in_features
    for i, units in enumerate(hidden, start=1):
        specs.append(LayerSpec("dense", name=f"fc{i}", in_features=features, out_features=units))
        specs.append(LayerSpec("leaky_relu", name=f"act{i}", slope=slope))
        features = units
    specs.append(LayerSpec("dense", name=f"fc{len(hidden) + 1}", in_features=features, out_features=out_features))
    return specs


def build_mlp_generator(latent_dim, out_features, rng, hidden=(64, 64), slope=0.2, dtype="f32"):
    """Fully connected generator for low-dimensional toy data"""
    if latent_dim < 1 or out_features < 1:
        raise ValueError("latent_dim and out_features must be positive")
    return Network(_mlp(latent_dim, hidden, out_features, slope), (latent_dim,), rng=rng, dtype=dtype, kind="mlp_generator")


def build_mlp_critic(in_features, rng, hidden=(64, 64), slope=0.2, dtype="f32", output="linear"):
    specs = _mlp(in_features, hidden, 1, slope)
    if output == "sigmoid":
        specs.append(LayerSpec("sigmoid", name="prob"))
    return Network(specs, (in_features,), rng=rng, dtype=dtype, kind="mlp_critic")
