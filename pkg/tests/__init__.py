"""Tests for the pushpull-fatigue library."""
