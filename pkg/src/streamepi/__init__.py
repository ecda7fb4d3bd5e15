"""Streaming frequent serial-episode mining over sliding windows."""
