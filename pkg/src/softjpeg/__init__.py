"""softjpeg: soft decoding and joint restoration of baseline JPEG images."""

__version__ = "0.1.0"
