"""3-D median filter stage"""

from ..component_base import ComponentBase
from ...imaging.filters import median_filter_3d

info = {
    "class_name": "MedianFilter",
    "description": "Replace the job's stack by its 3-D median filtered version",
    "config_parameters": [
        {
            "name": "radius",
            "type": "int",
            "required": False,
            "default": 1,
            "description": "Neighbourhood radius; the window is (2r+1)^3 voxels",
        },
    ],
}


class MedianFilter(ComponentBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)

    def invoke(self, message, data):
        data["stack"] = median_filter_3d(data["stack"], self.get_config("radius"))
        return data
