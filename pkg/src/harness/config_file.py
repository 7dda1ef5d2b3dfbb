"""
Flat key=value configuration files mirroring the long CLI flags
"""
from utils.errors import ParseError

_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off')


def load_config_file(path):
    """
    Read `key = value` lines; '#' starts a comment, dashes in keys become underscores

    Returns:
        dict key -> (raw string value, line number)

    Raises:
        ParseError: line without '=', empty key, or a repeated key
    """
    values = {}
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            key, sep, value = text.partition('=')
            key = key.strip().lstrip('-').replace('-', '_')
            if not sep or not key:
                raise ParseError('expected "key = value"', path=path, line=number)
            if key in values:
                raise ParseError(f'duplicate key {key!r}', path=path, line=number)
            values[key] = (value.strip(), number)
    return values


def _convert(action, raw, path, number):
    if action.nargs == 0:
        lowered = raw.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ParseError(f'{action.dest}: expected a boolean, got {raw!r}', path=path, line=number)
    convert = action.type or str
    try:
        if action.nargs in ('+', '*'):
            return [convert(part) for part in raw.replace(',', ' ').split()]
        value = convert(raw)
    except (TypeError, ValueError):
        raise ParseError(f'{action.dest}: invalid value {raw!r}', path=path, line=number) from None
    if action.choices is not None and value not in action.choices:
        raise ParseError(f'{action.dest}: {raw!r} is not one of {list(action.choices)}', path=path, line=number)
    return value


def config_defaults(parser, values, path=None):
    """
    Convert file values with the parser's own option types

    The result is meant for parser.set_defaults(), so explicit command-line
    flags still win.

    Raises:
        ParseError: key that is not an option of this parser
    """
    actions = {action.dest: action for action in parser._actions if action.option_strings}
    defaults = {}
    for key, (raw, number) in values.items():
        if key not in actions or key in ('help', 'config'):
            raise ParseError(f'unknown option {key!r}', path=path, line=number)
        defaults[key] = _convert(actions[key], raw, path, number)
    return defaults
