"""Set file persistence.

Format: line 1 is ``group <f2|fp|zmod|z> [n=..] [p=..] [m=..]``, then one
element per line in the group's grammar.  Lines starting with '#' and blank
lines are ignored.  Writing emits elements in canonical sorted order so the
round-trip is bit-exact.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .groups import Group, GroupError, parse_group
from .sets import FiniteSet, build_set


class SetFileError(GroupError):
    """Malformed set file."""


def parse_set_text(text: str) -> FiniteSet:
    group: Group | None = None
    elems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if group is None:
            if not line.startswith("group "):
                raise SetFileError(f"line {lineno}: expected 'group ...' header")
            try:
                group = parse_group(line[len("group "):])
            except GroupError as exc:
                raise SetFileError(f"line {lineno}: {exc}") from None
            continue
        try:
            elems.append(group.parse(line))
        except GroupError as exc:
            raise SetFileError(f"line {lineno}: {exc}") from None
    if group is None:
        raise SetFileError("missing group header")
    if not elems:
        raise SetFileError("set file contains no elements")
    return build_set(group, elems)


def read_set_file(path) -> FiniteSet:
    return parse_set_text(Path(path).read_text())


def format_set(fs: FiniteSet) -> str:
    fmt = fs.group.format
    lines = [f"group {fs.group.describe()}"]
    lines.extend(fmt(a) for a in fs.sorted_elements)
    return "\n".join(lines) + "\n"


def write_set_file(fs: FiniteSet, path) -> None:
    atomic_write_text(path, format_set(fs))


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
