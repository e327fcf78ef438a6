from .smd import *
from .balance_table import *
from .histogram import *
