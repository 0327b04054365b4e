import sys

from contractsynth import create_app

app = create_app()

if __name__ == "__main__":
    sys.exit(app.run(sys.argv[1:]))
