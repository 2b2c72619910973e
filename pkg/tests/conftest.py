import functools

from rouquier.coxeter import builtin_realization
from rouquier.poly import RingCtx


@functools.lru_cache(maxsize=None)
def ring(name: str) -> RingCtx:
    return RingCtx(builtin_realization(name))


def word(name: str, text: str):
    return builtin_realization(name).system.parse_word(text)
