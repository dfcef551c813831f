"""
External frame ingestion: a directory of binary PGM (P5) files becomes one
SceneSequence, frames ordered by file name.
"""

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.simulation.scene import SceneSequence
from src.utils.errors import IngestionError
from src.utils.logger import get_logger
from src.utils.io import atomic_write_bytes


class FrameDirectoryClient:
    """
    Reads PGM frames from a directory.
    """

    def __init__(self, dir_path: str | Path):
        self.dir_path = Path(dir_path)

    def list_frames(self) -> list[Path]:
        if not self.dir_path.is_dir():
            raise IngestionError(f"{self.dir_path} is not a directory")
        files = sorted(p for p in self.dir_path.iterdir() if p.is_file() and not p.name.startswith("."))
        if not files:
            raise IngestionError(f"{self.dir_path} contains no frames")
        return files

    def read_frame(self, path: Path) -> np.ndarray:
        with open(path, "rb") as handle:
            magic = handle.read(2)
        if magic != b"P5":
            raise IngestionError(f"{path.name} is not a binary PGM (P5) file")
        try:
            with Image.open(path) as img:
                img.load()
                # Pillow rescales maxval to the full 8- or 16-bit range of the mode
                full_scale = 255.0 if img.mode == "L" else 65535.0
                return np.asarray(img, dtype=np.float64) / full_scale
        except (UnidentifiedImageError, OSError) as exc:
            raise IngestionError(f"Cannot decode {path.name}: {exc}") from exc

    def load_sequence(self) -> SceneSequence:
        frames = []
        for path in self.list_frames():
            frame = self.read_frame(path)
            if frames and frame.shape != frames[0].shape:
                raise IngestionError(
                    f"{path.name} is {frame.shape[0]}x{frame.shape[1]}, "
                    f"expected {frames[0].shape[0]}x{frames[0].shape[1]}"
                )
            frames.append(frame)
        get_logger("FrameDirectoryClient").info(f"Loaded {len(frames)} frames from {self.dir_path}")
        return SceneSequence(frames=np.clip(np.stack(frames), 0.0, 1.0), metadata={"source": str(self.dir_path)})


def load_external_frames(dir_path: str | Path) -> SceneSequence:
    return FrameDirectoryClient(dir_path).load_sequence()


def write_pgm(image: np.ndarray, path: str | Path) -> Path:
    """8-bit P5 dump of an image in [0, 1]."""
    pixels = np.round(np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)
    buffer = io.BytesIO()
    Image.fromarray(pixels).save(buffer, format="PPM")
    return atomic_write_bytes(path, buffer.getvalue())
