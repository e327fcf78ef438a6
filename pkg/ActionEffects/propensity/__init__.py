from .design import *
from .logistic import *
from .overlap import *
