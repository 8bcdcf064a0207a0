"""
Application Entry Point
Run with: python main.py run --config run.env
"""

import sys

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
