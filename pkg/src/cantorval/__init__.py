"""Cantorval - windows, invertibility and boundary dimension of binary Pisot substitutions"""
from .__about__ import __version__

__all__ = ['__version__']
