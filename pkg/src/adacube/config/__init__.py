from .configfile import Config

__all__ = ["Config"]
