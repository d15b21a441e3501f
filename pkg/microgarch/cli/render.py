from pathlib import Path
from typing import Any

import jinja2

THIS_DIR = Path(__file__).parent
_TMPL_ENV = jinja2.Environment(
    loader=jinja2.FileSystemLoader(THIS_DIR / "templates"),
    undefined=jinja2.StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _num(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}g}"


_TMPL_ENV.filters["num"] = _num


def render(template: str, **context: Any) -> str:
    """Render one of the human-readable reports in ``templates/``.

    :param template: The template file name, e.g. ``stats.txt.j2``.
    :param context: The template variables. A missing one is an error.
    """
    return _TMPL_ENV.get_template(template).render(**context)
