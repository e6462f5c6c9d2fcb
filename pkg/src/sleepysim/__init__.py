"""Round-synchronous simulator for message-passing graph algorithms with
congestion and energy (sleeping) accounting."""

__version__ = "0.1.0"
