"""Console entrypoint: ``python -m src`` or the ``dti-lab`` script."""

from .app import create_app


def main() -> None:
    create_app()(prog_name="dti-lab")


if __name__ == "__main__":
    main()
