"""Utility modules for the L4S simulator"""

from .logger import get_logger, get_structured_logger

__all__ = ['get_logger', 'get_structured_logger']
