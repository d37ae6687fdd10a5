"""Full-width versus half-width classifiers on a small training set"""

from ..common.log import log
from ..gan.overfit import overfit_demo
from .command_base import CommandBase
from .parameters import DTYPE, OUT, SEED, network_parameters, train_parameters

MEMORIZATION_ACCURACY = 0.99

info = {
    "class_name": "OverfitDemoCommand",
    "command": "overfit-demo",
    "section": "overfit_demo",
    "description": (
        "Train every width once per seed on the same small synthetic split and "
        "report the test accuracy table. Writes overfit.csv."
    ),
    "config_parameters": [
        OUT,
        SEED,
        DTYPE,
        {"name": "train_size", "type": "int", "default": 198, "description": "Training patches"},
        {"name": "test_size", "type": "int", "default": 200, "description": "Test patches"},
        {"name": "seeds", "type": "int", "default": 10, "description": "Seeds per width"},
        {"name": "widths", "type": "float_list", "default": [1.0, 0.5], "description": "Width scales to compare"},
        {"name": "patch", "type": "int", "default": 32, "description": "Patch side"},
        *train_parameters(
            "batch_size",
            "epochs",
            "lr_classifier",
            "betas_classifier",
            "dropout_rate",
            "augment",
            "flip_vertical",
            "flip_horizontal",
            "brightness_delta",
            "contrast_delta",
        ),
        *network_parameters("base_filters", "hidden_units"),
    ],
}


class OverfitDemoCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def run(self):
        out = self.get_config("out")
        widths = self.get_config("widths")
        if not widths or self.get_config("seeds") < 1:
            raise ValueError("overfit-demo needs at least one width and one seed")
        cfg = self.train_config()
        net_cfg = self.network_config(self.get_config("patch"), width_scale=1.0)
        self.write_resolved_config(out)
        report = overfit_demo(
            cfg,
            train_size=self.get_config("train_size"),
            test_size=self.get_config("test_size"),
            widths=widths,
            seeds=self.get_config("seeds"),
            net_cfg=net_cfg,
            out_dir=out,
        )
        widest = max(report.summaries, key=lambda summary: summary.width_scale)
        if widest.mean_train_accuracy < MEMORIZATION_ACCURACY:
            log.warning(
                "%sWidth %.2f reached only %.3f train accuracy; the training set was not memorized",
                self.log_identifier,
                widest.width_scale,
                widest.mean_train_accuracy,
            )
        return 0
