"""Fixture package for wgmsqueeze tests."""
