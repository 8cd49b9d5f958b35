"""Reading and writing tensor files and reports."""
from __future__ import annotations

import json
from pathlib import Path

from .algebra import SignatureError
from .tensors import EndoTensor, MetricTensor, tensor_from_json


class TensorParseError(ValueError):
    pass


def parse_tensor_file(data: bytes | str) -> EndoTensor | MetricTensor:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TensorParseError(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise TensorParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise TensorParseError("top-level value must be an object")
    try:
        return tensor_from_json(obj)
    except (KeyError, TypeError, ValueError, SignatureError, ZeroDivisionError) as exc:
        raise TensorParseError(str(exc)) from exc


def read_tensor(path: str | Path) -> EndoTensor | MetricTensor:
    return parse_tensor_file(Path(path).read_bytes())


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
