"""L4S end-host stack and DualPI2 discrete-event simulator"""

__version__ = "1.0.0"
