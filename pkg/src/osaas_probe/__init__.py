"""Channel-probing toolkit for optical spectrum services.

Estimates the GSNR of a spectrum slot through a black-box line system with
characterized coherent transceiver configurations, selects the best
configuration under a symbol-rate cap, and derives spectral and operational
diagnostics (misalignment, tilt/ripple, operation regime, drift).
"""

__version__ = "0.1.0"
