"""Ad-hoc text-to-table extraction with interactive embedding-space matching."""

__version__ = "0.1.0"
