"""Offline embedding exporter for the summarization engine.

Encodes every sentence of a cluster (or a JSON Lines sentence list) with
an off-the-shelf sentence encoder and writes the engine's binary SEMB
embedding file plus a JSON manifest.
"""

from embed_export.exporter import ExportJob, ExportManifest, export

__version__ = "0.1.0"
