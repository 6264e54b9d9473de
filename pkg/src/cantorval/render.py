"""Two-row raster and SVG pictures of sampled windows: W_a on top, W_b below."""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from loguru import logger

from .errors import RenderError
from .substitution import LETTERS
from .windows import PointCloud

RGB = Tuple[int, int, int]


@dataclass(frozen=True)
class RenderStyle:
    color_a: RGB = (31, 84, 180)
    color_b: RGB = (200, 40, 40)
    background: RGB = (255, 255, 255)
    margin: int = 4
    row_gap: int = 6


def _extent(cloud: PointCloud, extent: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
    if extent is not None:
        return extent
    points = cloud.union()
    if points.size == 0:
        return None
    lo, hi = float(points[0]), float(points[-1])
    if hi <= lo:
        hi = lo + 1.0
    return lo, hi


def occupied_columns(points: np.ndarray, extent: Tuple[float, float], columns: int) -> np.ndarray:
    """Sorted indices of the pixel columns hit by ``points``."""
    if points.size == 0 or columns <= 0:
        return np.zeros(0, dtype=np.int64)
    lo, hi = extent
    scaled = np.floor((points - lo) / (hi - lo) * columns).astype(np.int64)
    return np.unique(np.clip(scaled, 0, columns - 1))


def _row_bands(height: int, style: RenderStyle) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    inner = max(height - 2 * style.margin - style.row_gap, 2)
    half = inner // 2
    top = (style.margin, style.margin + half)
    bottom = (top[1] + style.row_gap, top[1] + style.row_gap + half)
    return top, bottom


def raster(cloud: PointCloud, width: int = 800, height: int = 200,
           style: Optional[RenderStyle] = None,
           extent: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """RGB image of shape (height, width, 3); blank when the cloud is empty."""
    if width < 1 or height < 1:
        raise ValueError("Image size must be positive")
    style = style or RenderStyle()
    image = np.empty((height, width, 3), dtype=np.uint8)
    image[:, :] = style.background
    extent = _extent(cloud, extent)
    if extent is None:
        return image
    columns = width - 2 * style.margin
    for letter, (row_lo, row_hi), color in zip(LETTERS, _row_bands(height, style),
                                               (style.color_a, style.color_b)):
        hit = occupied_columns(cloud.of(letter), extent, columns) + style.margin
        image[min(row_lo, height):min(row_hi, height), hit] = color
    return image


def write_ppm(image: np.ndarray, path: Union[str, Path]) -> None:
    height, width, _ = image.shape
    try:
        with open(path, 'wb') as f:
            f.write(f"P6\n{width} {height}\n255\n".encode('ascii'))
            f.write(np.ascontiguousarray(image, dtype=np.uint8).tobytes())
    except OSError as e:
        raise RenderError(f"Cannot write image {path}: {str(e)}", {'path': str(path)})


def svg_document(cloud: PointCloud, width: int = 800, height: int = 200,
                 style: Optional[RenderStyle] = None,
                 extent: Optional[Tuple[float, float]] = None) -> str:
    """SVG with one rect per occupied pixel column, merged into runs."""
    style = style or RenderStyle()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="{}" height="{}" fill="rgb({},{},{})"/>'.format(width, height, *style.background),
    ]
    extent = _extent(cloud, extent)
    if extent is not None:
        columns = width - 2 * style.margin
        for letter, (row_lo, row_hi), color in zip(LETTERS, _row_bands(height, style),
                                                   (style.color_a, style.color_b)):
            fill = "rgb({},{},{})".format(*color)
            hit = occupied_columns(cloud.of(letter), extent, columns)
            if hit.size == 0:
                continue
            # split into maximal runs of consecutive columns
            breaks = np.nonzero(np.diff(hit) > 1)[0]
            starts = np.concatenate(([hit[0]], hit[breaks + 1]))
            ends = np.concatenate((hit[breaks], [hit[-1]]))
            for start, end in zip(starts.tolist(), ends.tolist()):
                parts.append(f'<rect class="w{letter}" x="{start + style.margin}" y="{row_lo}" '
                             f'width="{end - start + 1}" height="{row_hi - row_lo}" fill="{fill}"/>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render(cloud: PointCloud, path: Union[str, Path], width: int = 800, height: int = 200,
           style: Optional[RenderStyle] = None,
           extent: Optional[Tuple[float, float]] = None) -> Path:
    """Write the cloud picture; ``.svg`` paths get SVG, anything else binary PPM."""
    path = Path(path)
    if path.suffix.lower() == '.svg':
        document = svg_document(cloud, width, height, style, extent)
        try:
            path.write_text(document)
        except OSError as e:
            raise RenderError(f"Cannot write image {path}: {str(e)}", {'path': str(path)})
    else:
        write_ppm(raster(cloud, width, height, style, extent), path)
    logger.debug(f"Rendered {len(cloud)} samples to {path}")
    return path
