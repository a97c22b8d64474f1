from .informed import *
from .rrt_connect import *
from .rrt_star import *
from .sampling import *
from .shortcut import *
from .tree import *
