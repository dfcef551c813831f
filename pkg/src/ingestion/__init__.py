from src.ingestion.frames import FrameDirectoryClient, load_external_frames, write_pgm

__all__ = [
    "FrameDirectoryClient",
    "load_external_frames",
    "write_pgm",
]
