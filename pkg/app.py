#!/usr/bin/env python3
"""
Double Fibration Toolkit - Main Entry Point
===========================================
Command-line front end for the finite category toolkit: validators,
fibration checks, the elements and fibers constructions, equivalence
round trips and the seeded corpus.

Usage: python app.py <command> [options]
       python app.py check double-fibration corpus/double/00_dom_chain3.json
       python app.py corpus --seed 0 --jobs 4
"""

import sys

from dotenv import load_dotenv

from api.cli import main

# Load environment variables
load_dotenv()

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n🛑 Interrupted", file=sys.stderr)
        sys.exit(130)
