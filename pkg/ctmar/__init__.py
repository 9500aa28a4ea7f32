"""Metal artifact simulation and classical metal artifact reduction for 2D CT."""
