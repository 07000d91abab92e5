"""Image preparation: stretch-resize to a square, ImageNet normalization."""

from __future__ import annotations

import numpy as np
from PIL import Image

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


def preprocess_image(image: Image.Image, side: int, flip: bool = False) -> np.ndarray:
    """Resize (stretching, no letterbox), optionally mirror, normalize.

    Returns a float32 (3, side, side) array of ImageNet-normalized RGB.
    """
    resized = image.convert("RGB").resize((side, side), Image.BILINEAR)
    if flip:
        resized = resized.transpose(Image.FLIP_LEFT_RIGHT)
    pixels = np.asarray(resized, dtype=np.float32) / 255.0
    mean = np.asarray(IMAGENET_MEAN, dtype=np.float32)
    std = np.asarray(IMAGENET_STD, dtype=np.float32)
    normalized = (pixels - mean) / std
    return np.ascontiguousarray(normalized.transpose(2, 0, 1))
