"""Export raw center-point detector heads to CNHM map files.

The exporter never post-processes: no decoding, no NMS, no augmentation
fusion. It resizes and normalizes an image, runs one forward pass per
(scale, flip) branch, and dumps the three head tensors verbatim so that
all detection logic stays downstream, behind the file format.
"""

from .cnhm import write_cnhm
from .export import ExportJob, ModelLoadFailure, UnreadableImage, export_image, load_model
from .preprocess import IMAGENET_MEAN, IMAGENET_STD, preprocess_image

__version__ = "0.1.0"

__all__ = [
    "ExportJob",
    "IMAGENET_MEAN",
    "IMAGENET_STD",
    "ModelLoadFailure",
    "UnreadableImage",
    "export_image",
    "load_model",
    "preprocess_image",
    "write_cnhm",
]
