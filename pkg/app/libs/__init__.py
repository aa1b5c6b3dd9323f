"""Algorithm libraries of the biomarker discovery toolkit."""
