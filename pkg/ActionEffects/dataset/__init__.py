from .schema import *
from .table import *
from .summary import *
