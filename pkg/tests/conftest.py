import os
import sys

# make the shared oracle helpers importable as plain `import oracles`
sys.path.insert(0, os.path.dirname(__file__))
