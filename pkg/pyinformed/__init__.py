from .exceptions import *
from .utils import *
from .core import *
from .sampling import *
from .worlds import *
from .neighbors import *
from .planner import *
from .oracle import *
from .statistics import *
from .plotting import *
from .bench import *
