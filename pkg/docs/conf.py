# Sphinx configuration for pcbfv.
#
# Build with:  sphinx-build docs docs/_build

import os
import sys

# engine/ and utilities/ are imported relative to the program folder
sys.path.insert(0, os.path.abspath('..'))
sys.path.insert(0, os.path.abspath('../pcbfv'))

# -- Project information -----------------------------------------------------

project = 'pcbfv'
copyright = '2026 Michael R. McPherson'
author = 'Michael R. McPherson'

version = '1.0'
release = '1.0'

# -- General configuration ---------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.napoleon', 'sphinx.ext.mathjax']

# docstrings are short prose, with the odd Args:/Returns: block
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_special_with_doc = True

autodoc_member_order = 'bysource'
autodoc_mock_imports = ['hexdump']

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'alabaster'
htmlhelp_basename = 'pcbfvdoc'

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'pcbfv', 'pcbfv Documentation', [author], 1)
]
