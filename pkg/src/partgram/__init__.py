"""Part-grammar toolkit: box-token programs and the pipeline around them."""

__version__ = "0.1.0"
