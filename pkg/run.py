"""
Simple script to run the Vlasov-Maxwell harness.
Just run: python run.py <command> [--key value ...]

Examples:
  python run.py run --scenario free_streaming --output out/free_streaming.csv
  python run.py converge --scenario maxwell_vacuum_1d --levels 4 --assert
  python run.py verify-identities --trials 20 --assert
  python run.py scenario-check
"""
from vmdg.harness.cli import main

if __name__ == "__main__":
    main()
