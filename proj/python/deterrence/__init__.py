"""Entry-deterrence game solver on controlled CKLS demand."""

from ._deterrence import *  # noqa: F401,F403
from ._deterrence import __doc__  # noqa: F401
