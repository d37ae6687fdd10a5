"""Per-slice brightness range adjustment stage"""

from ..component_base import ComponentBase
from ...imaging.filters import adjust_stack_brightness

info = {
    "class_name": "BrightnessAdjust",
    "description": "Stretch the intensity window [p_low, p_high] of every slice onto the full range",
    "config_parameters": [
        {"name": "p_low", "type": "float", "required": False, "default": 1.0, "description": "Lower percentile"},
        {"name": "p_high", "type": "float", "required": False, "default": 99.0, "description": "Upper percentile"},
    ],
}


class BrightnessAdjust(ComponentBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)
        self.p_low = self.get_config("p_low")
        self.p_high = self.get_config("p_high")
        if not 0 <= self.p_low < self.p_high <= 100:
            raise ValueError(
                f"{self.log_identifier}Percentiles must satisfy 0 <= p_low < p_high <= 100"
            )

    def invoke(self, message, data):
        data["stack"] = adjust_stack_brightness(data["stack"], self.p_low, self.p_high)
        return data
