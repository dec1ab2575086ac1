"""Small JSON Lines and atomic-write helpers used by every exporter."""

import json
import os
import tempfile

from wsskit.errors import ParseError


def dumps_record(record: dict) -> str:
    """Serialize one record compactly, preserving key insertion order."""
    return json.dumps(record, separators=(",", ":"), ensure_ascii=True)


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in the same dir."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_jsonl(path, records) -> None:
    """Write records as JSON Lines, atomically."""
    atomic_write_text(path, "".join(dumps_record(r) + "\n" for r in records))


def read_jsonl(path):
    """Yield (line_number, dict) pairs; raises ParseError on bad lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", path=str(path), line=lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", path=str(path), line=lineno)
            yield lineno, obj
