from .config import *
from .pipeline import *
from .simulate import *
from .report import *
from .main import *
