from .formatter import getLogger, setLogger

__version__ = '0.3.0'
