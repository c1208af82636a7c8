"""Online policies for multi-agent ski rental with a shared group pass."""

__version__ = "0.1.0"
