"""vsl-dro: data-driven distributionally robust variable speed-limit control."""
__version__ = "0.3.0"
