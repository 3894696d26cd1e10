"""Loading, indexing and serving dense word vectors.

Three interchange formats are supported:

* ``word2vec-text``: a header line ``"<count> <dims>"`` followed by one
  ``"<token> <v1> ... <vdims>"`` line per word, space-separated.
* ``word2vec-binary``: the same header line in ASCII, then per record the
  token bytes up to an ASCII space followed by ``dims`` consecutive 32-bit
  little-endian IEEE floats; newline characters adjacent to tokens are
  stripped, matching the de-facto writer.
* ``glove-text``: no header; the dimensionality is inferred from the first
  line and enforced on all others.

Values are stored as float32 (the on-disk precision of the binary format);
row accessors upcast to float64 so downstream metric sums are reproducible
regardless of the source precision.  A loaded matrix is immutable and safe
to share across concurrent readers.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Optional, Sequence, Union

import numpy as np

from ranksim.errors import FormatError, OOVError

FORMATS = ("word2vec-text", "word2vec-binary", "glove-text")

_FORMAT_ALIASES = {
    "word2vec-text": "word2vec-text",
    "w2v-text": "word2vec-text",
    "word2vec-binary": "word2vec-binary",
    "w2v-bin": "word2vec-binary",
    "glove-text": "glove-text",
    "glove": "glove-text",
}

PathOrStream = Union[str, "io.IOBase", BinaryIO]


def normalize_format(fmt: str) -> str:
    """Map a format name or CLI alias to its canonical name."""
    try:
        return _FORMAT_ALIASES[fmt.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown embedding format {fmt!r}; expected one of {sorted(set(_FORMAT_ALIASES))}"
        ) from None


class Vocabulary:
    """Ordered set of unique tokens with O(1) token -> row lookup."""

    __slots__ = ("tokens", "index")

    def __init__(self, tokens: Sequence[str]):
        tokens = list(tokens)
        index = {}
        for i, tok in enumerate(tokens):
            if not tok:
                raise ValueError("empty-string token is not allowed")
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        self.tokens = tokens
        self.index = index

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def row_of(self, token: str) -> Optional[int]:
        return self.index.get(token)


class EmbeddingMatrix:
    """Immutable vocabulary-indexed dense matrix, one row per word.

    ``data`` holds the raw float32 values; :meth:`row` returns a float64
    copy for metric computation.  ``n_duplicates`` counts source records
    dropped by the keep-first duplicate policy at load time.
    """

    __slots__ = ("vocab", "data", "n_duplicates")

    def __init__(self, vocab: Vocabulary, data: np.ndarray, n_duplicates: int = 0):
        data = np.ascontiguousarray(data, dtype=np.float32)
        if data.ndim != 2:
            raise ValueError("embedding data must be a 2-D matrix")
        if data.shape[0] != len(vocab):
            raise ValueError(
                f"vocabulary size {len(vocab)} does not match matrix rows {data.shape[0]}"
            )
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("embedding matrix must be at least 1 x 1")
        if not np.isfinite(data).all():
            raise ValueError("embedding matrix contains non-finite values")
        self.vocab = vocab
        self.data = data
        self.n_duplicates = n_duplicates
        self.data.setflags(write=False)

    @property
    def dims(self) -> int:
        return self.data.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def row(self, i: int) -> np.ndarray:
        """Row ``i`` upcast to float64."""
        return self.data[i].astype(np.float64)

    def vector(self, token: str, lowercase: bool = False) -> Optional[np.ndarray]:
        """Vector for ``token`` (float64), or None when absent."""
        i = lookup(self, token, lowercase=lowercase)
        return None if i is None else self.row(i)


@dataclass(frozen=True)
class PhrasePolicy:
    """How multiword phrases are matched against the vocabulary.

    The compound form (internal whitespace replaced by ``join_char``) is
    tried first; ``fallback`` decides what happens when it is absent:
    ``"average-tokens"`` averages the vectors of the in-vocabulary
    constituent tokens, ``"fail"`` raises.
    """

    join_char: str = "_"
    fallback: str = "average-tokens"

    def __post_init__(self):
        if len(self.join_char) != 1 or not self.join_char.isprintable():
            raise ValueError("join_char must be a single printable character")
        if self.fallback not in ("average-tokens", "fail"):
            raise ValueError("fallback must be 'average-tokens' or 'fail'")


DEFAULT_POLICY = PhrasePolicy()


def lookup(matrix: EmbeddingMatrix, token: str, lowercase: bool = False) -> Optional[int]:
    """Row id of ``token``, exact match first, optional lowercase fallback."""
    i = matrix.vocab.row_of(token)
    if i is None and lowercase:
        i = matrix.vocab.row_of(token.lower())
    return i


def resolve_phrase_row(
    matrix: EmbeddingMatrix,
    phrase: str,
    policy: PhrasePolicy = DEFAULT_POLICY,
    lowercase: bool = False,
) -> Optional[int]:
    """Row id of the compound form of ``phrase``, or None when absent."""
    parts = phrase.split()
    if not parts:
        raise ValueError("phrase must be non-empty")
    compound = policy.join_char.join(parts)
    return lookup(matrix, compound, lowercase=lowercase)


def resolve_phrase(
    matrix: EmbeddingMatrix,
    phrase: str,
    policy: PhrasePolicy = DEFAULT_POLICY,
    lowercase: bool = False,
) -> np.ndarray:
    """Vector for ``phrase``.

    The compound form is tried first; with the average-tokens fallback the
    result is the mean of the in-vocabulary constituent vectors.  Raises
    :class:`OOVError` when nothing resolves.
    """
    row = resolve_phrase_row(matrix, phrase, policy, lowercase=lowercase)
    if row is not None:
        return matrix.row(row)
    if policy.fallback == "fail":
        raise OOVError(f"phrase {phrase!r} is not in the vocabulary")
    rows = [lookup(matrix, tok, lowercase=lowercase) for tok in phrase.split()]
    present = [r for r in rows if r is not None]
    if not present:
        raise OOVError(f"no constituent token of {phrase!r} is in the vocabulary")
    return mean_vector([matrix.row(r) for r in present])


def mean_vector(vectors: Iterable[np.ndarray]) -> np.ndarray:
    """Component-wise arithmetic mean, accumulated in list order."""
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not arrays:
        raise ValueError("mean_vector requires at least one vector")
    length = arrays[0].shape
    if any(a.ndim != 1 for a in arrays) or any(a.shape != length for a in arrays):
        raise ValueError("mean_vector requires equal-length 1-D vectors")
    acc = np.zeros(length, dtype=np.float64)
    for a in arrays:
        acc += a
    return acc / len(arrays)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_embeddings(source: PathOrStream, fmt: str = "word2vec-text") -> EmbeddingMatrix:
    """Load an :class:`EmbeddingMatrix` from a path or binary stream.

    Duplicate tokens follow a keep-first policy; the number of dropped
    records is reported via a warning and ``matrix.n_duplicates``.
    """
    fmt = normalize_format(fmt)
    stream, owned = _open_binary(source)
    try:
        if fmt == "word2vec-text":
            tokens, rows, n_dup = _load_w2v_text(stream)
        elif fmt == "word2vec-binary":
            tokens, rows, n_dup = _load_w2v_binary(stream)
        else:
            tokens, rows, n_dup = _load_glove_text(stream)
    finally:
        if owned:
            stream.close()
    if not tokens:
        raise FormatError("embedding source contains no records")
    data = np.vstack(rows)
    if not np.isfinite(data).all():
        raise FormatError("embedding source contains non-finite values")
    if n_dup:
        warnings.warn(
            f"dropped {n_dup} duplicate token record(s) (keep-first policy)",
            stacklevel=2,
        )
    return EmbeddingMatrix(Vocabulary(tokens), data, n_duplicates=n_dup)


def _open_binary(source: PathOrStream):
    if hasattr(source, "read"):
        return source, False
    return open(source, "rb"), True


def _decode_line(raw: bytes, lineno: int) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"line {lineno}: invalid UTF-8 ({e})") from None


def _parse_values(fields, dims, lineno):
    if len(fields) != dims:
        raise FormatError(
            f"line {lineno}: expected {dims} values, found {len(fields)}"
        )
    try:
        return np.array(fields, dtype=np.float32)
    except ValueError:
        raise FormatError(f"line {lineno}: non-numeric vector component") from None


def _parse_header(line: str) -> tuple[int, int]:
    fields = line.split()
    if len(fields) != 2:
        raise FormatError("header must be '<count> <dims>'")
    try:
        count, dims = int(fields[0]), int(fields[1])
    except ValueError:
        raise FormatError("header must contain two integers") from None
    if count < 1 or dims < 1:
        raise FormatError("header count and dims must be positive")
    return count, dims


def _load_w2v_text(stream):
    header = stream.readline()
    if not header:
        raise FormatError("empty word2vec-text stream")
    count, dims = _parse_header(_decode_line(header, 1))
    tokens, rows = [], []
    seen = set()
    n_records = 0
    n_dup = 0
    for lineno, raw in enumerate(stream, start=2):
        line = _decode_line(raw, lineno).rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split()
        token = fields[0]
        values = _parse_values(fields[1:], dims, lineno)
        n_records += 1
        if token in seen:
            n_dup += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(values)
    if n_records != count:
        raise FormatError(
            f"header declares {count} records but stream contains {n_records}"
        )
    return tokens, rows, n_dup


def _load_glove_text(stream):
    tokens, rows = [], []
    seen = set()
    dims = None
    n_dup = 0
    for lineno, raw in enumerate(stream, start=1):
        line = _decode_line(raw, lineno).rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split()
        if dims is None:
            dims = len(fields) - 1
            if dims < 1:
                raise FormatError("line 1: no vector components to infer dims from")
        token = fields[0]
        values = _parse_values(fields[1:], dims, lineno)
        if token in seen:
            n_dup += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(values)
    return tokens, rows, n_dup


def _read_binary_token(stream) -> bytes:
    # Token bytes run up to an ASCII space; newlines adjacent to tokens
    # (the record separator of the de-facto writer) are stripped.
    chunks = []
    while True:
        ch = stream.read(1)
        if not ch:
            if chunks:
                raise FormatError("truncated binary record: EOF inside token")
            return b""
        if ch == b" ":
            break
        if ch in (b"\n", b"\r"):
            continue
        chunks.append(ch)
    return b"".join(chunks)


def _load_w2v_binary(stream):
    if isinstance(stream, io.RawIOBase):
        stream = io.BufferedReader(stream)  # byte-at-a-time token reads
    header = stream.readline()
    if not header:
        raise FormatError("empty word2vec-binary stream")
    count, dims = _parse_header(_decode_line(header, 1))
    record_bytes = 4 * dims
    tokens, rows = [], []
    seen = set()
    n_dup = 0
    for rec in range(count):
        raw_token = _read_binary_token(stream)
        if not raw_token:
            raise FormatError(
                f"truncated word2vec-binary stream: {rec} of {count} records read"
            )
        try:
            token = raw_token.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"record {rec + 1}: invalid UTF-8 token ({e})") from None
        buf = stream.read(record_bytes)
        if len(buf) != record_bytes:
            raise FormatError(
                f"truncated binary record for token {token!r}: "
                f"expected {record_bytes} bytes, got {len(buf)}"
            )
        values = np.frombuffer(buf, dtype="<f4").copy()
        if token in seen:
            n_dup += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(values)
    return tokens, rows, n_dup


# ---------------------------------------------------------------------------
# Saving
# ---------------------------------------------------------------------------


def save_embeddings(matrix: EmbeddingMatrix, dest: PathOrStream, fmt: str = "word2vec-text") -> None:
    """Write ``matrix`` to ``dest`` in the given format.

    Text formats serialize values with 6 significant digits; the binary
    format round-trips the stored float32 values bit-exactly.
    """
    fmt = normalize_format(fmt)
    stream, owned = _open_binary_write(dest)
    try:
        if fmt == "word2vec-binary":
            _write_w2v_binary(matrix, stream)
        else:
            _write_text(matrix, stream, header=(fmt == "word2vec-text"))
        stream.flush()
    finally:
        if owned:
            stream.close()


def _open_binary_write(dest):
    if hasattr(dest, "write"):
        return dest, False
    return open(dest, "wb"), True


def _format_value(v: np.float32) -> str:
    return format(float(v), ".6g")


def _write_text(matrix, stream, header: bool) -> None:
    if header:
        stream.write(f"{len(matrix)} {matrix.dims}\n".encode("utf-8"))
    for i, token in enumerate(matrix.vocab.tokens):
        values = " ".join(_format_value(v) for v in matrix.data[i])
        stream.write(f"{token} {values}\n".encode("utf-8"))


def _write_w2v_binary(matrix, stream) -> None:
    stream.write(f"{len(matrix)} {matrix.dims}\n".encode("utf-8"))
    for i, token in enumerate(matrix.vocab.tokens):
        stream.write(token.encode("utf-8") + b" ")
        stream.write(matrix.data[i].astype("<f4").tobytes())
        stream.write(b"\n")
