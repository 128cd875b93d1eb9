import os

from dotenv import load_dotenv

load_dotenv()

# Defaults for the explicit knobs; function arguments and CLI flags override them.
DEFAULT_CHECK_DEPTH = int(os.getenv("LTIOCO_CHECK_DEPTH", "8"))
DEFAULT_SPANTRACE_DEPTH = int(os.getenv("LTIOCO_SPANTRACE_DEPTH", "3"))
DEFAULT_ORACLE_LENGTH = int(os.getenv("LTIOCO_ORACLE_LENGTH", "6"))
ITERATION_CAP = int(os.getenv("LTIOCO_ITERATION_CAP", "200000"))
