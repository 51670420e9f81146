import os
import tempfile
from contextlib import contextmanager


@contextmanager
def atomic_write(path, encoding="utf-8"):
    """Open a temp file next to ``path`` and rename it into place on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_metadata(path, meta):
    with atomic_write(path) as fh:
        for key, value in meta.items():
            fh.write(f"{key}={value}\n")


def read_metadata(path):
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, value = line.partition("=")
            meta[key] = value
    return meta
