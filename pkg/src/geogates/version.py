__version_vector__ = (0, 3, 0)
__version__ = '.'.join(str(x) for x in __version_vector__)
