"""Serialized file schemas for the command line tool."""
