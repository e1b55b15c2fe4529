from _qsst import *  # noqa: F401,F403
