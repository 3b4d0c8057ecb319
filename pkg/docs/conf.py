# Sphinx configuration for the orthofrac documentation.
#
# Project settings live in custom_conf.py; this file wires them into the
# theme and extensions shared by all builders.

import sys

sys.path.append("./")
from custom_conf import *  # noqa: F403

extensions = [
    "sphinx_design",
    "sphinx_tabs.tabs",
    "sphinx_reredirects",
    "sphinx_copybutton",
    "sphinxext.opengraph",
    "myst_parser",
    "notfound.extension",
]
extensions.extend(custom_extensions)  # noqa: F405

myst_enable_extensions = ["substitution", "deflist", "dollarmath"]

notfound_context = {
    "title": "Page not found",
    "body": "<h1>Page not found</h1>\n<p>Use the navigation or search to find the page.</p>\n",
}
if slug:  # noqa: F405
    notfound_urls_prefix = "/" + slug + "/en/latest/"  # noqa: F405

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store", ".sphinx"]
exclude_patterns.extend(custom_excludes)  # noqa: F405

rst_epilog = """
.. include:: /reuse/links.txt
"""

source_suffix = {
    ".rst": "restructuredtext",
    ".md": "markdown",
}

linkcheck_anchors_ignore_for_url = custom_linkcheck_anchors_ignore_for_url  # noqa: F405

html_theme = "furo"
html_last_updated_fmt = ""
html_permalinks_icon = "¶"
html_css_files = custom_html_css_files  # noqa: F405
html_js_files = custom_html_js_files  # noqa: F405
