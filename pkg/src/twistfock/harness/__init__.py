"""Command line, configuration, identity suite and report export."""
