"""
    qteich
    ~~~~~~

    Local representations of the quantum Teichmueller space of punctured
    surfaces at roots of unity.

    Builds matrix representations from triangulations and edge weights,
    transports weights under diagonal exchanges, solves for intertwining
    operators and reconstructs the holonomy of the pleated surface.

    :copyright: 2020 by qteich Authors, see AUTHORS for more details.
    :license: BSD, see LICENSE for more details.
"""

from .common import QteichError, logger
from .qalgebra import QParams
from .surface import Triangulation

__all__ = ["QParams", "QteichError", "Triangulation", "logger"]
