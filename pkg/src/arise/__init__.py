"""Data backbone for a heritage-resilience explorer: crowdsourced hazard
reports, review analytics, sentiment-conditioned artwork generation,
climate what-if simulation, and the geolocated HTTP API tying them together."""

__version__ = "0.1.0"
