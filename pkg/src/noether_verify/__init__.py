"""noether-verify - exact verification of Noether identities for gauge theories."""

__version__ = "0.1.0"
