from .clock import *
from .episode import *
from .events import *
from .mailbox import *
from .services import *
from .settings import *
from .trajectory import *
