"""Readers and writers for TSV inputs, checkpoints and run reports."""
