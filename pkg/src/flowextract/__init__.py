"""flowextract: directed-graph extraction from raster flowchart images."""

__version__ = "0.1.0"
