"""promptkey: a system-wide shortcut layer between text selections and LLMs.

Select text in any application, hit the global hotkey, pick a quick action or
type a query, preview the response as a word-level diff, and insert it back
into the app without switching windows.
"""

__version__ = "0.1.0"
