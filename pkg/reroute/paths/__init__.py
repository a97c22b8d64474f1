from .checking import *
from .dump import *
from .projection import *
from .types import *
