# -*- coding: utf-8 -*-

"""This file contains default values for configurations and parameters."""

import logging
import logging.handlers as handlers
import os
from fractions import Fraction

from .constants import DATA_DIR, LOG_DIR, PROJECT_DIR

###############################################################################
# Decision procedure limits

DEFAULT_K_MAX = 12
DEFAULT_POINT_CAP = 10**7  # lattice points in the absorbing ball
DEFAULT_DK_CAP = 2**22  # q**k digit strings for D_{A,k} and tile point clouds
DEFAULT_MAX_STEPS = 10**5  # digit steps per expansion
MAX_CONTRACTION_POWER = 512

###############################################################################
# Sampling

DEFAULT_SAMPLES = 20000
DEFAULT_DEPTH = 14
DEFAULT_SEED = 20050228
SAMPLE_CHUNK = 1000  # samples per seeded stream
RENDER_CHUNK = 2**16  # pixel centers per batched search
SAMPLE_BITS = 40  # dyadic resolution of sampled points

DEFAULT_PROBE_RADIUS = Fraction(1, 20)
DEFAULT_PROBE_STEPS = 4

# Cover rasters, cells per axis by dimension
COVER_CELLS = {1: 8192, 2: 1024, 3: 128}
COVER_POINT_BUDGET = 2**18

###############################################################################
# Verdict thresholds

REFINEMENT_PASS_RATE = 0.99
MAX_OFFDIAGONAL_OVERLAP = 0.05
MULTIPLICITY_TOLERANCE = 0.05
SINGULAR_VALUE_TOLERANCE = 1e-6

###############################################################################
# Figure 1

FIGURE1_DEPTH = 16
FIGURE1_SIZE = (800, 800)

###############################################################################

SQLITE_DATABASE_NAME = "radixtiles.db"
DATABASE_LOCATION = os.path.join(DATA_DIR, SQLITE_DATABASE_NAME)

###############################################################################
# SQLAlchemy connection strings
# =============================
# SQLite
# ------
CONN_STR_DEFAULT = "sqlite:///" + DATABASE_LOCATION

###############################################################################
# Config
config_file_path = os.path.join(PROJECT_DIR, "config.ini")

###############################################################################
# Log Handling
logHandler = handlers.RotatingFileHandler(
    filename=os.path.join(LOG_DIR, "radixtiles.log"),
    mode="a",
    maxBytes=4098 * 10,
    backupCount=0,
)
logh_format = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logHandler.setFormatter(logh_format)
logHandler.setLevel(logging.DEBUG)

# Console Handler
ch = logging.StreamHandler()
ch_format = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")
ch.setFormatter(ch_format)
ch.setLevel(logging.WARNING)
