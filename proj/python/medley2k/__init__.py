"""Medley transition dataset pipeline.

Parsing (SMF, MusicXML/MXL), transition labeling and validation, 12-bar
piano-roll encoding with doubled hold symbols, augmentation, and
distribution-distance evaluation metrics.
"""

try:
    from . import _medley2k as _impl  # installed wheel layout
except ImportError:  # extension on sys.path next to a source checkout
    import _medley2k as _impl

__all__ = []
for _name in dir(_impl):
    if _name.startswith("__"):
        continue
    globals()[_name] = getattr(_impl, _name)
    __all__.append(_name)

__version__ = "0.1.0"
