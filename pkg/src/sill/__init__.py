"""sill: an executable toolkit for the session calculi CP and HCP."""

__version__ = "0.1.0"
