"""Allow running as `python -m radareye`."""

from .cli import main

if __name__ == '__main__':
    main()
