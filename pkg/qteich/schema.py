"""
    qteich.schema
    ~~~~~~~~~~~~~

    Schema for the descriptor files and the run configuration.

    Complex numbers are stored as [re, im]. Faces, slots and edges
    are 1-based in every file.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

from typing import Dict, List

from datastruct import DataStruct, validators
from datastruct.exceptions import MultipleError

from .common import SchemaError, logger


class TriangulationFile(DataStruct):
    faces: int
    gluing: List[List[List[int]]] = []
    labels: List[List[int]] = None


class QFile(DataStruct):
    N: int
    c: int = 1


class FaceData(DataStruct):
    w: List[List[float]]
    h: List[float]


class RepFile(DataStruct):
    q: QFile
    faces: List[FaceData]
    triangulation: TriangulationFile = None


class WeightsFile(DataStruct):
    weights: List[List[float]]


class Tolerances(DataStruct):
    scalar: float = 1e-9
    intertwine: float = 1e-8
    scalar_residual: float = 1e-6
    singular: float = 1e-12
    holonomy: float = 1e-8
    load: float = 1e-9


class RunConfig(DataStruct):
    N: int = 2
    c: int = 1
    format: validators.value_in("json", "human") = "json"
    seed: int = 0
    max_dim: int = 4096
    depth: int = 8
    tolerances: Dict[str, float] = {}


def build(cls, content, where="input"):
    """Instantiate a schema, turning validation failures into a SchemaError.

    Parameters
    ----------
    cls : type
        a DataStruct subclass.
    content : dict
    where : str
        name of the source, used in messages.

    Returns
    -------
    DataStruct
    """
    if not isinstance(content, dict):
        raise SchemaError(f"{where}: expected a mapping, got {type(content).__name__}")
    try:
        return cls(content)
    except MultipleError as mex:
        problems = [
            "%s %s %s"
            % (type(ex).__name__, ex.key, ".".join(ex.path).replace(".[", "["))
            for ex in mex.exceptions
        ]
        for problem in problems:
            logger.error(f"{where}: {problem}")
        raise SchemaError(f"{where} does not match the {cls.__name__} schema", problems)


def build_config(filenames):
    """Merge yaml configuration files, later files taking precedence.

    Parameters
    ----------
    filenames : list of str

    Returns
    -------
    RunConfig
    """
    try:
        return RunConfig.from_filenames(list(reversed(filenames)))
    except MultipleError as mex:
        problems = [
            "%s %s %s"
            % (type(ex).__name__, ex.key, ".".join(ex.path).replace(".[", "["))
            for ex in mex.exceptions
        ]
        for problem in problems:
            logger.error(f"configuration: {problem}")
        raise SchemaError("Invalid configuration", problems)


def tolerances_from(overrides):
    """Tolerances with the given overrides applied."""
    unknown = set(overrides) - set(Tolerances.__annotations__)
    if unknown:
        raise SchemaError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
    for key, value in overrides.items():
        if not value > 0:
            raise SchemaError(f"tolerance {key} must be positive")
    return build(Tolerances, {k: float(v) for k, v in overrides.items()}, "tolerances")
