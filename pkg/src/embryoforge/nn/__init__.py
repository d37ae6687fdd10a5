from .params import ParamSet, init_params, he_normal
from .adam import AdamState, adam_step
