# Atomic file writing helpers

import os
import tempfile
from pathlib import Path
from typing import Callable, Union

from .exceptions import FileAccessError

PathLike = Union[str, os.PathLike]


def atomic_write(path: PathLike, writer: Callable[[Path], None]) -> Path:
    """Write a file through a temporary sibling and rename it into place.

    Args:
        path: Final destination
        writer: Callable that writes the complete file to the path it is given

    Returns:
        The destination path

    Raises:
        FileAccessError: If the directory is not writable or the write fails
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=target.suffix, dir=target.parent)
        os.close(fd)
    except OSError as e:
        raise FileAccessError(f"Cannot write to {target.parent}: {e}") from e

    tmp_path = Path(tmp_name)
    try:
        writer(tmp_path)
        os.replace(tmp_path, target)
    except OSError as e:
        tmp_path.unlink(missing_ok=True)
        raise FileAccessError(f"Failed to write {target}: {e}") from e
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise
    return target


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """Atomically write raw bytes."""
    return atomic_write(path, lambda tmp: tmp.write_bytes(data))


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Atomically write UTF-8 text."""
    return atomic_write(path, lambda tmp: tmp.write_text(text, encoding="utf-8"))
