"""Microarray biomarker discovery toolkit."""
