"""Flow-graph SDR engine with an 802.11p receiver and a modeled FFT accelerator."""

__version__ = "0.1.0"
