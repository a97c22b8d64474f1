from .budget import *
from .online import *
from .path_switch import *
