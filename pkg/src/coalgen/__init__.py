"""Synthetic, annotated ground-truth datasets for coalition asset-sharing policies."""

__version__ = "0.1.0"
