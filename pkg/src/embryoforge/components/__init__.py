# Consolidate all components in one place

from .preprocess import (
    stack_reader,
    median_filter,
    brightness_adjust,
    patch_extractor,
    patch_writer,
)

from .preprocess.stack_reader import StackReader
from .preprocess.median_filter import MedianFilter
from .preprocess.brightness_adjust import BrightnessAdjust
from .preprocess.patch_extractor import PatchExtractor
from .preprocess.patch_writer import PatchWriter
