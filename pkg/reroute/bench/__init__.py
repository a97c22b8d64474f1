from .cli import *
from .export import *
from .metrics import *
from .protocol import *
from .renderer import *
from .scenario import *
from .spawns import *
