from .errors import *
from .utils import *
from .dataset import *
from .propensity import *
from .matching import *
from .balance import *
from .effects import *
from .synthlab import *
from .cli import *
