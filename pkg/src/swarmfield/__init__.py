"""Cooperative contour-following obstacle avoidance for UAV swarms."""

__version__ = "0.1.0"
