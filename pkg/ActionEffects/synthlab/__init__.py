from .scenario import *
from .generate import *
from .suite import *
