"""Natural frequencies of cracked functionally graded Mindlin plates."""

__version__ = "0.1.0"
