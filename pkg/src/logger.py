import logging
import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

def setup_logging(level: Optional[str] = None):
    log_level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    logging.getLogger("networkx").setLevel(logging.WARNING)
    logging.basicConfig(
        level=getattr(logging, log_level, logging.INFO),
        format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    )
    logging.getLogger().setLevel(getattr(logging, log_level, logging.INFO))
    return logging.getLogger("ltioco")
