import logging
import os
from datetime import datetime


def create_logger(
    name,
    folder_path=None,
    file_name=None,
    tag=None,
    format=None,
    mode="a",
    def_level=logging.ERROR,
    level=logging.DEBUG,
):
    """Creates a named logger that prints to console and optionally to a file.

    Console output is limited to `def_level`, the file receives everything
    from `level` up. Calling it again for the same name replaces the
    handlers instead of stacking them.
    """

    format = format or f"%(asctime)s:%(module)s[%(lineno)d]:%(levelname)s:{f'[{tag}]:' if tag else ''}%(message)s"
    formatter = logging.Formatter(format)

    logger = logging.getLogger(name)
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()
    logger.propagate = False

    if folder_path:
        if not os.path.exists(folder_path):
            os.makedirs(folder_path)
        file_handler = logging.FileHandler(
            filename=os.path.join(folder_path, file_name or get_logname()),
            encoding="utf-8",
            mode=mode,
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    console = logging.StreamHandler()
    console.setLevel(def_level)
    console.setFormatter(formatter)
    logger.addHandler(console)

    logger.setLevel(level)
    return logger


def get_logname() -> str:
    """Gets log name in Y-M-Wn format where n is week number, starts from 0
    Example: 2021-06-W0"""
    weekno = (
        datetime.today().isocalendar()[1]
        - datetime.today().replace(day=1).isocalendar()[1]
    )
    return datetime.today().strftime("%Y-%m-W") + str(weekno) + ".log"
