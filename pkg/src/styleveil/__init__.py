"""styleveil: fast, interpretable authorship obfuscation.

Trains a lightweight n-gram authorship classifier once, ranks POS n-gram
features by integrated-gradients importance, and rewrites matching token
spans via masked-phrase replacement.
"""

__version__ = "0.1.0"
