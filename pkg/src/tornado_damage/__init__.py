"""Zero-inflated neural networks for tornado-induced property damage.

A damage-occurrence classifier and a conditional log-scale damage regressor
trained on fused storm, land cover, and socioeconomic features, with a
gridded scenario generator and an HTTP inference service.
"""

__version__ = "0.1.0"
