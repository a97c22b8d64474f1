from .collision import *
from .kinematics import *
from .metric import *
from .types import *
