# koszul_cli.py
"""
Command-line entry point.

    python koszul_cli.py decompose --fn bilinear --n 2 --M 32 --out output/bilinear.json
    python koszul_cli.py laws --trials 200 --seed 1
    python koszul_cli.py dbar --n 2 --M 24 --potential-file potential.form
    python koszul_cli.py converge --fn expsum --n 2 --M 16,32
"""

import os
import sys

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
