r"""
    Canonical JSON for scenario documents and the content identifiers derived from it.

    Emission is canonical: map keys are sorted first by the length of their UTF-8 encoding and then by the encoded bytes
    (the DAG-CBOR map order), separators carry no whitespace, and floats are written with :func:`repr`.
    Emitting a parsed canonical document therefore reproduces it byte for byte.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

import json
import math
from typing import Any, Dict, List, Tuple, Union

from typing_extensions import TypedDict
from typing_validation import validate

from multiformats import CID, multicodec, multihash

from .err import ScenarioDecodingError, ScenarioEncodingError
from ._path import JSONValue, ScenarioPath

_json_multicodec = multicodec.get("json")

class _EncodeOptions(TypedDict, total=False):
    r""" Options passed around to emission sub-routines. """

    indent: int
    r""" Indentation per nesting level; canonical (single-line) output when absent. """

def canonical_order_dict(value: Dict[str, Any]) -> Dict[str, Any]:
    r"""
        Returns a dictionary with canonically ordered keys: by UTF-8 length, then by UTF-8 bytes.

        >>> list(canonical_order_dict({"tau": 1.0, "gamma": 1.0, "a": None}))
        ['a', 'tau', 'gamma']
    """
    validate(value, Dict[str, Any])
    pairs = [(k.encode("utf-8", errors="strict"), k, v) for k, v in value.items()]
    return {k: v for _, k, v in sorted(pairs, key=lambda i: (len(i[0]), i[0]))}

def encode(value: JSONValue, *, indent: int = 0) -> bytes:
    r"""
        Emits a value as canonical JSON bytes.

        >>> encode({"tau": 1.0, "gamma": 2, "name": "log"})
        b'{"tau":1.0,"name":"log","gamma":2}'

        :param indent: pretty-print with this indentation per level (the bytes are then not canonical)

        :raises ScenarioEncodingError: if a float is NaN or infinite, a key is not a string,
                                       or a value is not of JSON kind
    """
    validate(indent, int)
    options: _EncodeOptions = {}
    if indent > 0:
        options["indent"] = indent
    parts: List[str] = []
    _encode(parts, value, ScenarioPath(), options, 0)
    return "".join(parts).encode("utf-8")

def _newline(options: _EncodeOptions, depth: int) -> str:
    if "indent" not in options:
        return ""
    return "\n"+" "*(options["indent"]*depth)

def _encode(parts: List[str], value: JSONValue, path: ScenarioPath, options: _EncodeOptions, depth: int) -> None:
    # pylint: disable = too-many-branches
    if value is None:
        parts.append("null")
    elif isinstance(value, bool): # must go before int check
        parts.append("true" if value else "false")
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ScenarioEncodingError(f"Error encoding float value at {path}: {value!r} is not allowed.")
        parts.append(repr(value))
    elif isinstance(value, str):
        parts.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, list):
        parts.append("[")
        for idx, item in enumerate(value):
            if idx:
                parts.append(",")
            parts.append(_newline(options, depth+1))
            _encode(parts, item, path/idx, options, depth+1)
        if value:
            parts.append(_newline(options, depth))
        parts.append("]")
    elif isinstance(value, dict):
        for idx, k in enumerate(value.keys()):
            if not isinstance(k, str):
                raise ScenarioEncodingError(f"Error encoding map at {path}: key at position {idx} is not a string.")
        sep = ": " if "indent" in options else ":"
        parts.append("{")
        for idx, (k, v) in enumerate(canonical_order_dict(value).items()):
            if idx:
                parts.append(",")
            parts.append(_newline(options, depth+1))
            parts.append(json.dumps(k, ensure_ascii=False)+sep)
            _encode(parts, v, path/k, options, depth+1)
        if value:
            parts.append(_newline(options, depth))
        parts.append("}")
    else:
        raise ScenarioEncodingError(f"Error encoding value at {path}: value is not of JSON kind "
                                    f"(found type {type(value)}).")

def _reject_constant(name: str) -> Any:
    raise ScenarioDecodingError(f"Error decoding document: non-finite number {name} is not allowed.")

def _unique_keys(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for k, v in pairs:
        if k in result:
            raise ScenarioDecodingError(f"Error decoding document: duplicate key {k!r}.")
        result[k] = v
    return result

def decode(data: Union[bytes, str]) -> JSONValue:
    r"""
        Parses JSON, rejecting non-finite numbers and duplicate keys.

        >>> decode(b'{"nx": 64, "t_final": 1.5}')
        {'nx': 64, 't_final': 1.5}

        :raises ScenarioDecodingError: if the data is not valid JSON, or contains non-finite numbers or duplicate keys
    """
    validate(data, Union[bytes, str])
    try:
        text = data.decode("utf-8", errors="strict") if isinstance(data, bytes) else data
        value: JSONValue = json.loads(text, parse_constant=_reject_constant, object_pairs_hook=_unique_keys)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ScenarioDecodingError(f"Error decoding document: {e}") from e
    return value

def content_id(value: JSONValue) -> CID:
    r"""
        The CIDv1 (base32, multicodec ``json``, ``sha2-256``) of the canonical bytes of a value.

        >>> str(content_id({})).startswith("b")
        True
    """
    digest = multihash.digest(encode(value), "sha2-256")
    return CID("base32", 1, _json_multicodec, digest)

__all__ = ("canonical_order_dict", "encode", "decode", "content_id")
