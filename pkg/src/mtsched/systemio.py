"""JSON system files.

Format::

    {"m": 2, "tasks": [{"offset": 0, "wcets": [2, 2], "deadline": 12, "period": 12}]}

The order of ``wcets`` is the subprogram index order.
"""

from __future__ import annotations

import json
from pathlib import Path

from mtsched.model import Task, TaskSystem


class SystemFormatError(ValueError):
    """Malformed system file; the message names the offending field."""


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SystemFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def system_from_dict(data) -> TaskSystem:
    if not isinstance(data, dict):
        raise SystemFormatError("top level: expected an object with 'm' and 'tasks'")
    if "m" not in data:
        raise SystemFormatError("m: missing")
    if "tasks" not in data:
        raise SystemFormatError("tasks: missing")
    m = _int(data["m"], "m")
    if not isinstance(data["tasks"], list) or not data["tasks"]:
        raise SystemFormatError("tasks: expected a non-empty list")
    tasks = []
    for i, raw in enumerate(data["tasks"]):
        where = f"tasks[{i}]"
        if not isinstance(raw, dict):
            raise SystemFormatError(f"{where}: expected an object")
        for key in ("offset", "wcets", "deadline", "period"):
            if key not in raw:
                raise SystemFormatError(f"{where}.{key}: missing")
        wcets = raw["wcets"]
        if not isinstance(wcets, list) or not wcets:
            raise SystemFormatError(f"{where}.wcets: expected a non-empty list")
        wcets = tuple(_int(c, f"{where}.wcets[{j}]") for j, c in enumerate(wcets))
        try:
            tasks.append(Task(
                _int(raw["offset"], f"{where}.offset"),
                wcets,
                _int(raw["deadline"], f"{where}.deadline"),
                _int(raw["period"], f"{where}.period"),
            ))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SystemFormatError):
                raise
            raise SystemFormatError(f"{where}: {exc}") from None
    try:
        return TaskSystem(tuple(tasks), m)
    except ValueError as exc:
        raise SystemFormatError(f"m: {exc}") from None


def system_to_dict(system: TaskSystem) -> dict:
    return {
        "m": system.processors,
        "tasks": [
            {"offset": t.offset, "wcets": list(t.wcets), "deadline": t.deadline, "period": t.period}
            for t in system.tasks
        ],
    }


def loads(text: str) -> TaskSystem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFormatError(f"not valid JSON: {exc}") from None
    return system_from_dict(data)


def dumps(system: TaskSystem) -> str:
    return json.dumps(system_to_dict(system))


def load(path) -> TaskSystem:
    return loads(Path(path).read_text())


def dump(system: TaskSystem, path) -> None:
    Path(path).write_text(dumps(system) + "\n")
