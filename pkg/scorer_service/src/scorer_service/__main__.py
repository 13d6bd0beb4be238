"""Launch the scorer service: ``python -m scorer_service``."""

import os

import uvicorn

from .app import create_app


def main() -> None:
    port = int(os.environ.get("SCORER_PORT", "8301"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
