"""
    qteich.fixtures
    ~~~~~~~~~~~~~~~

    Example surfaces shipped with the package.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

import functools
import pathlib

from .common import InputError
from .storage import _retrieve, load_triangulation_file, triangulation_from_dict
from .surface import Triangulation

FIXTURE_DIR = pathlib.Path(__file__).parent.joinpath("fixtures")


def fixture_names():
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


@functools.lru_cache(maxsize=None)
def load_fixture(name) -> Triangulation:
    """Triangulation of a named example surface.

    Parameters
    ----------
    name : str
        one of triangle, square, pentagon, torus, sphere4.

    Returns
    -------
    Triangulation
    """
    path = FIXTURE_DIR.joinpath(name).with_suffix(".json")
    if not path.exists():
        raise InputError(
            f"unknown fixture {name!r} (available: {', '.join(fixture_names())})"
        )
    return triangulation_from_dict(_retrieve(path), name)


def load_triangulation(name_or_path) -> Triangulation:
    """A fixture name or the path of a triangulation file."""
    if pathlib.Path(name_or_path).suffix:
        return load_triangulation_file(name_or_path)
    return load_fixture(name_or_path)
