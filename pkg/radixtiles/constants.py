"""Defined variables used throughout the package."""
# -*- coding: utf-8 -*-

import os

THIS_DIR = os.path.dirname(__file__)
PROJECT_NAME = "radixtiles"

HOME = os.environ.get("RADIXTILES_HOME") or os.path.join(os.path.expanduser("~"), f".{PROJECT_NAME}")

# Path to folder
PROJECT_DIR = HOME
os.makedirs(PROJECT_DIR, exist_ok=True)

# Path to data folder
DATA_DIR = os.path.join(PROJECT_DIR, "data")
os.makedirs(DATA_DIR, exist_ok=True)

# Path to logs folder
LOG_DIR = os.path.join(PROJECT_DIR, "logs")
os.makedirs(LOG_DIR, exist_ok=True)

GRAMMAR_PROBLEM_PATH = os.path.join(THIS_DIR, "grammar", "problem.lark")
GRAMMAR_START = "start"

WORKED_EXAMPLES_SUITE = os.path.join(THIS_DIR, "data", "worked_examples.json")

# Environment variables
ENV_POINT_CAP = "RADIXTILES_CAP"

# Config sections
LIMITS = "LIMITS"
SAMPLING = "SAMPLING"
DATABASE = "DATABASE"

# Digit sources of a problem
CANONICAL = "canonical"
EXPLICIT = "explicit"

# Exit codes of the CLI
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CROSS_CHECK = 2

# Named matrices used in examples, tests and the bundled suite
TWIN_DRAGON = ((1, 1), (-1, 1))
TWIN_DRAGON_DIGITS = ((0, 0), (1, 0))
