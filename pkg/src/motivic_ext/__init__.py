"""Motivic Ext charts over base-field profiles via the cobar complex."""

__version__ = "0.1.0"
