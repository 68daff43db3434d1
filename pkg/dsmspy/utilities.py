from fractions import Fraction
from numbers import Rational
import random
from typing import Any, List, Union

FractionLike = Union[Fraction, int, str, List[int]]


def parse_fraction(value: Any) -> Fraction:
    """
    parse an exact rational from one of the accepted encodings

    :param value: ``Fraction``, integer, ``[numerator, denominator]`` pair, or string such as ``"3/4"`` or ``"0.25"``
    :return: parsed fraction
    """

    if isinstance(value, bool):
        raise TypeError(f'boolean "{value}" is not a rational')
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f'rational pair "{value}" must have exactly two entries')
        numerator, denominator = value
        if denominator == 0:
            raise ValueError(f'rational pair "{value}" has a zero denominator')
        return Fraction(int(numerator), int(denominator))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as error:
            raise ValueError(f'could not parse rational from "{value}": {error}')
    if isinstance(value, float):
        raise TypeError(f'float "{value}" is not exact; pass "{value}" as a string instead')
    raise TypeError(f'cannot parse rational from {type(value).__name__} "{value}"')


def fraction_to_json(value: Fraction) -> List[int]:
    """
    :param value: rational to encode
    :return: ``[numerator, denominator]`` pair
    """

    value = Fraction(value)
    return [value.numerator, value.denominator]


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def derive_seed(seed: int, *salts: Any) -> int:
    """
    derive a reproducible 64-bit seed from a base seed and any number of salts

    :param seed: base seed
    :param salts: values distinguishing the derived stream (repetition index, purpose, ...)
    :return: derived seed
    """

    key = ':'.join(str(value) for value in (seed, *salts))
    return random.Random(key).getrandbits(64)
