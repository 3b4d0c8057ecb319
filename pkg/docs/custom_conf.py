import datetime
from typing import Dict, List

# Project-specific settings, included by conf.py.

project = "orthofrac"
author = "The orthofrac developers"

copyright = "2026-%s, %s" % (datetime.date.today().year, author)

ogp_site_name = project

# Set when the docs are published under a shared host.
slug = ""

redirects: Dict[str, str] = {}

linkcheck_ignore: List[str] = []

custom_linkcheck_anchors_ignore_for_url: List[str] = []

custom_extensions: List[str] = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx_toolbox.collapse",
]

custom_excludes: List[str] = []

custom_html_css_files: List[str] = []

custom_html_js_files: List[str] = []

autodoc_member_order = "bysource"
