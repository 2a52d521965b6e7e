"""Circle-state cat qudits, generalized quasi-Bell states and their teleportation protocol."""

__version__ = "0.1.0"
