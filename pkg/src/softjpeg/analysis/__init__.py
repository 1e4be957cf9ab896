"""
Closed-form model of DCT quantization error on 1-D ramps and steps.

``model`` holds the spectra, bounds and error bands; ``report`` writes them
to CSV for plotting.
"""
