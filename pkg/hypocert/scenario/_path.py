r"""
    Object paths within scenario documents, used to locate values in error messages.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from typing import ClassVar, Dict, Iterator, List, MutableMapping, overload, Sequence, Tuple, Union
from weakref import WeakValueDictionary

from typing_validation import validate

JSONScalar = Union[None, bool, int, float, str]
r"""
    Scalar values of a scenario document.
"""

JSONValue = Union[JSONScalar, List["JSONValue"], Dict[str, "JSONValue"]]
r"""
    Values of a scenario document: scalars, lists and string-keyed maps.
"""

PathSegment = Union[int, str]
r"""
    A segment of a :class:`ScenarioPath`: an :obj:`int` position in a list, or a :obj:`str` key in a map.
"""

_Segments = Tuple[PathSegment, ...]

class ScenarioPath(Sequence[PathSegment]):
    r"""
        Immutable, hashable path within a scenario document, as a sequence of segments.
        Paths print in the form ``/solver/nx``.
    """

    _instances: ClassVar[MutableMapping[_Segments, ScenarioPath]] = WeakValueDictionary()

    @staticmethod
    def parse(path_str: str) -> ScenarioPath:
        r"""
            Parses a path from its printed form, where numeric segments are list positions.

            >>> ScenarioPath.parse("/solver/nx")
            /solver/nx
            >>> ScenarioPath.parse("/runs/2")[1]
            2
        """
        if not path_str.startswith("/"):
            raise ValueError("Path must start with '/'.")
        if path_str == "/":
            return ScenarioPath._new_instance(())
        segs: List[PathSegment] = []
        for idx, seg_str in enumerate(path_str[1:].split("/")):
            if not seg_str:
                raise ValueError(f"At segment {idx}: empty segment.")
            segs.append(int(seg_str) if seg_str.isnumeric() else seg_str)
        return ScenarioPath._new_instance(tuple(segs))

    @staticmethod
    def _new_instance(segments: _Segments) -> ScenarioPath:
        instance = ScenarioPath._instances.get(segments)
        if instance is None:
            instance = object.__new__(ScenarioPath)
            instance._segments = segments
            ScenarioPath._instances[segments] = instance
        return instance

    _segments: _Segments

    def __new__(cls, *segments: PathSegment) -> ScenarioPath:
        validate(segments, _Segments)
        return ScenarioPath._new_instance(segments)

    def access(self, value: JSONValue) -> JSONValue:
        r"""
            The sub-value at this path, also written ``path >> value``.

            >>> _ = ScenarioPath()
            >>> _/"solver"/"nx" >> {"solver": {"nx": 64}}
            64

            :raises KeyError: if a key is missing from a map
            :raises IndexError: if a position is out of range for a list
            :raises ValueError: if a segment does not fit the kind of value it indexes
        """
        return _access(self, value)

    def __rshift__(self, value: JSONValue) -> JSONValue:
        return _access(self, value)

    def __truediv__(self, other: Union[PathSegment, ScenarioPath]) -> ScenarioPath:
        r"""
            Extends a path by a segment or by another path.

            >>> _ = ScenarioPath()
            >>> _/"model"/"potential"
            /model/potential
            >>> (_/"runs")/(_/0/"seed")
            /runs/0/seed
        """
        if isinstance(other, (int, str)):
            return ScenarioPath._new_instance(self._segments+(other,))
        if isinstance(other, ScenarioPath):
            return ScenarioPath._new_instance(self._segments+other._segments)
        return NotImplemented

    def __len__(self) -> int:
        return len(self._segments)

    def __iter__(self) -> Iterator[PathSegment]:
        return iter(self._segments)

    @overload
    def __getitem__(self, idx: int) -> PathSegment:
        ...

    @overload
    def __getitem__(self, idx: slice) -> ScenarioPath:
        ...

    def __getitem__(self, idx: Union[int, slice]) -> Union[PathSegment, ScenarioPath]:
        if isinstance(idx, int):
            return self._segments[idx]
        return ScenarioPath._new_instance(self._segments[idx])

    def __le__(self, other: ScenarioPath) -> bool:
        r"""
            Whether this path is a prefix of the other.

            >>> _ = ScenarioPath()
            >>> _/"model" <= _/"model"/"kinetic"
            True
        """
        if isinstance(other, ScenarioPath):
            return len(self) <= len(other) and all(a == b for a, b in zip(self, other))
        return NotImplemented

    def __lt__(self, other: ScenarioPath) -> bool:
        if isinstance(other, ScenarioPath):
            return len(self) < len(other) and self <= other
        return NotImplemented

    def __repr__(self) -> str:
        return "/"+"/".join(str(seg) for seg in self)

def _access(path: ScenarioPath, value: JSONValue, idx: int = 0) -> JSONValue:
    if idx >= len(path):
        return value
    key = path[idx]
    if isinstance(value, list):
        if not isinstance(key, int):
            raise ValueError(f"Error accessing value at {path[:idx+1]}: value at {path[:idx]} is a list, "
                             f"but segment {key!r} is not a position.")
        if key not in range(len(value)):
            raise IndexError(f"Error accessing value at {path[:idx+1]}: no position {key} in list at {path[:idx]}.")
        return _access(path, value[key], idx+1)
    if isinstance(value, dict):
        if not isinstance(key, str):
            raise ValueError(f"Error accessing value at {path[:idx+1]}: value at {path[:idx]} is a map, "
                             f"but segment {key!r} is not a key.")
        if key not in value:
            raise KeyError(f"Error accessing value at {path[:idx+1]}: no key {key!r} in map at {path[:idx]}.")
        return _access(path, value[key], idx+1)
    raise ValueError(f"Error accessing value at {path[:idx+1]}: value at {path[:idx]} is a scalar.")

__all__ = ("JSONScalar", "JSONValue", "PathSegment", "ScenarioPath")
