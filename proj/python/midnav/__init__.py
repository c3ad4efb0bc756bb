"""Python bindings for the midnav navigation harness."""

try:
    from midnav._midnav import *  # noqa: F401,F403
    from midnav._midnav import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _midnav import *  # noqa: F401,F403
    from _midnav import __version__  # noqa: F401
