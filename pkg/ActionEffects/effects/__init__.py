from .unit_effects import *
from .standard_errors import *
from .bootstrap import *
from .estimate import *
