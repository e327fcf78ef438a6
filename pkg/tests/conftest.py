import logging

import numpy as np
import pandas as pd
import pytest

from ActionEffects.dataset import ObservationTable, Schema, VariableSpec
from ActionEffects.synthlab import generate, get_scenario


@pytest.fixture(autouse=True)
def reset_package_logger():
    """The CLI installs its own stderr handler; undo it between tests."""
    yield
    logger = logging.getLogger('ActionEffects')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
    logger.propagate = True


@pytest.fixture
def toy_schema():
    return Schema('z', 'y', (VariableSpec('x1', 'continuous'),
                             VariableSpec('b1', 'binary'),
                             VariableSpec('c1', 'categorical', ('A', 'B', 'C'))))


@pytest.fixture
def toy_frame():
    return pd.DataFrame({
        'z': [1, 0, 1, 0, 0, 1, 0, 1],
        'y': [2.5, 1.0, 3.0, 0.5, 1.5, 2.0, 0.0, 4.0],
        'x1': [0.3, -1.2, 1.1, 0.0, 0.4, 2.2, -0.7, 0.9],
        'b1': [1, 0, 1, 1, 0, 0, 0, 1],
        'c1': ['A', 'B', 'C', 'A', 'A', 'B', 'C', 'C'],
    })


@pytest.fixture
def toy_table(toy_schema, toy_frame):
    return ObservationTable.from_frame(toy_schema, toy_frame)


@pytest.fixture(scope='session')
def tiny_scenario_table():
    table, _ = generate(get_scenario('tiny'))
    return table


@pytest.fixture(scope='session')
def heterogeneous_data():
    return generate(get_scenario('heterogeneous'))
