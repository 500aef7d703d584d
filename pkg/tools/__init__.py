"""
Command tools for SwallowSense
"""

from .segment_tools import *
from .gridsearch_tools import *
from .extract_tools import *
from .train_tools import *
from .predict_tools import *
from .evaluate_tools import *
from .report_tools import *
from .synth_tools import *
