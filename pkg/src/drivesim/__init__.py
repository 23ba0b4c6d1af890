"""Peer-incentive learning testbed for sequential social dilemmas."""

__version__ = "0.1.0"
