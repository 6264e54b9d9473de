"""CLI module for cantorval"""
from .commands import app

__all__ = ['app']