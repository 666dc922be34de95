"""Tests for general setup."""
from pushpull_fatigue import __version__


def test_version():
    """Test for version tag."""
    assert __version__ is not None
