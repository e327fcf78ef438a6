from .structures import *
from .bases import BaseMatcher
from .matchers import *
from .match import *
from .expand import *
from .graph import *
