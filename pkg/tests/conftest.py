import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from uqmod.scalars import ScalarField, ParameterRegistry
from uqmod import rootdata
from uqmod.uqcore import UqAlgebra

_ENGINES = {}
_FIELDS = {}


def field_for(params=()):
    key = tuple(params)
    if key not in _FIELDS:
        _FIELDS[key] = ScalarField(ParameterRegistry(params))
    return _FIELDS[key]


def engine_for(kind, rank, params=()):
    key = (kind, rank, tuple(params))
    if key not in _ENGINES:
        _ENGINES[key] = UqAlgebra(rootdata.build(kind, rank),
                                  field_for(params))
    return _ENGINES[key]


@pytest.fixture(scope="session")
def F():
    return field_for()


@pytest.fixture(scope="session")
def Fp():
    return field_for([("p", "generic"), ("c", "generic")])
