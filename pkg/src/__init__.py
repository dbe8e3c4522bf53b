"""
BoSSL - Borrowing Synthetic Separation Logic synthesizer
借用合成分离逻辑程序合成器

Deductive synthesis of heap-manipulating programs from separation-logic
specifications with read-only borrows.
"""

__version__ = "0.1.0"
__license__ = "MIT"

__all__ = ["__version__", "__license__"]
