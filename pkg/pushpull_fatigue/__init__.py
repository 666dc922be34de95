"""Push/pull muscle fatigue simulator."""
