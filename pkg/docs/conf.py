#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# relfrac documentation build configuration file.

import os
import sys

# Import the package from the source tree, so its version is the one shown.
sys.path.insert(0, os.path.dirname(os.getcwd()))

import relfrac  # noqa: E402

# -- General configuration ---------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx_design",
    "sphinx_copybutton",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "relfrac"
copyright = "2026, The relfrac developers"

# The short X.Y version and the full version, including alpha/beta/rc tags.
version = relfrac.__version__
release = relfrac.__version__

exclude_patterns = ["_build"]
pygments_style = "default"

# Numpy-style docstrings throughout.
napoleon_google_docstring = False
napoleon_numpy_docstring = True

# -- Options for HTML output -------------------------------------------

html_theme = "pydata_sphinx_theme"
html_theme_options = {
    "logo": {
        "text": "relfrac",
    },
    "show_toc_level": 2,
    "header_links_before_dropdown": 4,
    "secondary_sidebar_items": ["page-toc", "sourcelink"],
}
html_static_path = ["_static"]
html_show_sphinx = False
htmlhelp_basename = "relfracdoc"

# -- Options for LaTeX output ------------------------------------------

latex_documents = [
    (
        "index",
        "relfrac.tex",
        "relfrac Documentation",
        "The relfrac developers",
        "manual",
    ),
]

# -- Options for manual page output ------------------------------------

man_pages = [
    ("index", "relfrac", "relfrac Documentation", ["The relfrac developers"], 1)
]
