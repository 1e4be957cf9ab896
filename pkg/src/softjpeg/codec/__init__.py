"""
Baseline JPEG at the coefficient level.

Submodules are imported directly (``softjpeg.codec.jpeg``,
``softjpeg.codec.decode``); the tables module is shared with the models.
"""
