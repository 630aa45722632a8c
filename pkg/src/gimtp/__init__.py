"""Graph-based interaction-aware multimodal 2D vehicle trajectory prediction."""

__version__ = "0.1.0"
