"""Link-level simulation of an amplifying RIS (two passive panels joined by
one power amplifier) and its passive-RIS benchmark."""

__version__ = "0.1.0"
