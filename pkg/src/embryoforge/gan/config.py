"""Training hyperparameters"""

from dataclasses import asdict, dataclass, fields

from ..common.errors import ConfigError
from ..imaging.augment import AugmentConfig
from ..tensor import resolve_dtype

LOSS_KINDS = ("minimax", "wgan_gp")


@dataclass
class TrainConfig:
    batch_size: int = 32
    iterations: int = 3000
    epochs: int = 30
    lr_classifier: float = 1e-5
    lr_gan: float = 1e-4
    betas_classifier: tuple = (0.9, 0.999)
    betas_gan: tuple = (0.0, 0.9)
    n_critic: int = 5
    penalty_weight: float = 10.0
    latent_dim: int = 128
    seed: int = 0
    loss_kind: str = "wgan_gp"
    saturating_generator: bool = False
    dropout_rate: float = 0.5
    augment: bool = True
    flip_vertical: bool = True
    flip_horizontal: bool = True
    brightness_delta: float = 0.1
    contrast_delta: float = 0.2
    dtype: str = "f32"
    sample_every: int = 500
    sample_grid: int = 8
    checkpoint_every: int = 500
    log_every: int = 100

    def __post_init__(self):
        self.betas_classifier = tuple(float(b) for b in self.betas_classifier)
        self.betas_gan = tuple(float(b) for b in self.betas_gan)
        if self.n_critic < 1:
            raise ConfigError(f"n_critic must be >= 1, got {self.n_critic}")
        if self.penalty_weight < 0:
            raise ConfigError(f"penalty_weight must be >= 0, got {self.penalty_weight}")
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError(f"loss_kind must be one of {LOSS_KINDS}, got '{self.loss_kind}'")
        if self.latent_dim < 1:
            raise ConfigError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if self.iterations < 0 or self.epochs < 0:
            raise ConfigError("iterations and epochs must not be negative")
        for betas in (self.betas_classifier, self.betas_gan):
            if len(betas) != 2 or not all(0.0 <= b < 1.0 for b in betas):
                raise ConfigError(f"Adam betas must be two values in [0, 1), got {betas}")
        try:
            resolve_dtype(self.dtype)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def augment_config(self):
        if not self.augment:
            return None
        return AugmentConfig(
            flip_vertical=self.flip_vertical,
            flip_horizontal=self.flip_horizontal,
            brightness_delta=self.brightness_delta,
            contrast_delta=self.contrast_delta,
        )

    def replace(self, **changes):
        data = self.to_dict()
        data.update(changes)
        return TrainConfig.from_dict(data)

    def to_dict(self):
        data = asdict(self)
        data["betas_classifier"] = list(self.betas_classifier)
        data["betas_gan"] = list(self.betas_gan)
        return data

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in (data or {}).items() if key in known})
