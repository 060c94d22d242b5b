import os
import logging

from dotenv import load_dotenv

load_dotenv()


def setup_logger():
    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "INFO").upper(),
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s"
    )
    return logging.getLogger("dsad-quantile")

logger = setup_logger()
