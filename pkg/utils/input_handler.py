import json
from pathlib import Path


class InputError(ValueError):
    pass


def detect_input_type(payload):
    """
    Classifies a parsed JSON document by its keys.
    JOB    : {"target": ..., "options": ..., "outputs": ...}
    TARGET : {"n": .., "amplitudes": [...]}
    LAYOUT : {"n": .., "data_gates": [...], "ancilla_gates": [...]}
    GATES  : {"gates": [...]} or a bare list of gates
    DISTRIBUTION : {"family": .., "n": ..}
    """
    if isinstance(payload, list):
        return "GATES"
    if not isinstance(payload, dict):
        return "UNKNOWN"
    if "target" in payload or "distribution" in payload:
        return "JOB"
    if "amplitudes" in payload:
        return "TARGET"
    if "data_gates" in payload and "ancilla_gates" in payload:
        return "LAYOUT"
    if "gates" in payload:
        return "GATES"
    if "family" in payload:
        return "DISTRIBUTION"
    return "UNKNOWN"


def load_json(path):
    """
    Reads a JSON file; decode failures carry line and column.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {p}: {e.strerror or e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{p}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def process_input(path, expected=None):
    """
    Main entry point for reading an input file.
    Returns (input_type, payload); `expected` restricts the accepted types.
    """
    payload = load_json(path)
    input_type = detect_input_type(payload)
    if input_type == "UNKNOWN":
        raise InputError(f"{path}: unrecognised document (no target, layout or gate keys)")
    if expected and input_type not in expected:
        raise InputError(f"{path}: expected {' or '.join(expected)}, found {input_type}")
    return input_type, payload
