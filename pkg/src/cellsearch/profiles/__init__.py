"""Packaged 3GPP power-delay profiles (text format: ``delay_ns power_db``)."""
