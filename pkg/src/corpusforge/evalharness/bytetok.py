"""Byte-fallback tokenizer: ids 0-255 are UTF-8 bytes, specials sit above.

Lets the packing and streaming paths run without an external tokenizer; the
mapping is bijective so decode(encode(text)) == text.
"""

from __future__ import annotations

EOD_ID = 256  # end of document (packing separator)
EOS_ID = 257  # end of sequence (chat terminator)
VOCAB_SIZE = 258


def byte_encode(text: str) -> list[int]:
    return list(text.encode("utf-8"))


def byte_decode(ids, skip_special: bool = False) -> str:
    raw = bytearray()
    for i in ids:
        if 0 <= i < 256:
            raw.append(i)
        elif i in (EOD_ID, EOS_ID):
            if not skip_special:
                raise ValueError(f"special token id {i} in byte stream (pass skip_special=True)")
        else:
            raise ValueError(f"token id {i} outside byte-fallback vocabulary")
    return raw.decode("utf-8")
