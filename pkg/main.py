import sys

from duopoly.main import main


if __name__ == "__main__":
    sys.exit(main())
