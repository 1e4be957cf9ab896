"""Soft decoding: patch grouping, low-rank denoising, interval clipping and the iterate loop."""
