import os
import sys

import django

sys.path.append(os.path.abspath(".."))
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tests.settings")
django.setup()

import hardylab  # noqa: E402

# The suffix of source filenames.
source_suffix = ".rst"

# The master toctree document.
master_doc = "index"

extensions = ["sphinx.ext.autodoc"]

# General information about the project.
project = "hardylab"
copyright = "2026, the hardylab developers"

# The short X.Y version and the full version.
version = release = hardylab.__version__

# List of directories, relative to source directory, that shouldn't be searched
# for source files.
exclude_trees = ["_build"]
