"""Anytime belief-space policy synthesis for LTLf tasks under label uncertainty."""
