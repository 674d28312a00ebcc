"""Sequential form of partition trees: pruning, flattening into tokens,
FIFO reconstruction, token vocabulary, and a line-oriented wire format.

For a symmetric matrix the strictly-above-diagonal part of the tree is
redundant.  Pruning removes every node whose submatrix lies strictly above the
diagonal; a diagonal-touching internal node keeps ``k*(k+1)/2`` children (in
ascending sibling rank) and an off-diagonal one keeps all ``k*k``.  The pruned
tree is flattened breadth-first into one token per internal node: the tuple of
its children's attributes, typed by whether that node touches the diagonal.
Reconstruction replays tokens against a FIFO queue of pending nodes and is
complete exactly when the queue empties.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .graphs import Graph, apply_ordering, invert_permutation, order_nodes, padded_size
from .tree import K2Tree, TreeNode, build_from_matrix, build_k2tree, rebuild_graph, rebuild_matrix

DIAGONAL = "d"
OFFDIAGONAL = "o"

BOS = 0
EOS = 1
PAD = 2
_SPECIALS = 3


class SequenceError(ValueError):
    """Base class for token-sequence errors."""


class TokenMismatchError(SequenceError):
    """Token kind or arity does not match the pending node."""


class InvalidTokenError(SequenceError):
    """Token values are impossible at the pending position."""


class TruncatedSequenceError(SequenceError):
    """Tokens ran out while nodes were still pending."""


class TrailingTokensError(SequenceError):
    """Tokens remain after the tree completed."""


class EmptyGraphError(SequenceError):
    """An all-zero matrix has no token sequence; it is carried as a header-only
    sequence with zero tokens."""


@dataclass(frozen=True)
class Token:
    kind: str  # DIAGONAL or OFFDIAGONAL
    values: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in (DIAGONAL, OFFDIAGONAL):
            raise SequenceError(f"unknown token kind {self.kind!r}")


@dataclass(frozen=True)
class TokenSequence:
    """Flattened pruned tree plus the header needed to decode it.

    ``perm`` optionally records the node ordering (new index -> original id)
    applied before encoding, so decoding can restore original node ids.
    """

    k: int
    padded_n: int
    original_n: int
    featured: bool = False
    node_vocab: int = 0
    edge_vocab: int = 0
    tokens: tuple[Token, ...] = ()
    perm: tuple[int, ...] | None = None

    @property
    def total_values(self) -> int:
        """Total attribute count over all tokens."""
        return sum(len(t.values) for t in self.tokens)


def diagonal_arity(k: int) -> int:
    return k * (k + 1) // 2


def offdiagonal_arity(k: int) -> int:
    return k * k


def child_orders(k: int, diagonal: bool) -> tuple[tuple[int, int], ...]:
    """Sibling orders kept under a node, ascending in rank ``k*(i-1)+j``."""
    if diagonal:
        return tuple((i, j) for i in range(1, k + 1) for j in range(1, i + 1))
    return tuple((i, j) for i in range(1, k + 1) for j in range(1, k + 1))


def node_position(path: tuple[tuple[int, int], ...], k: int) -> tuple[int, int]:
    """1-based block position ``(p, q)`` of the node addressed by ``path``.

    ``p = sum_l k**(L-l) * (i_l - 1) + 1`` and symmetrically for ``q``.
    """
    if not path:
        raise ValueError("path must be non-empty")
    length = len(path)
    p = q = 1
    for idx, (i, j) in enumerate(path, start=1):
        if not (1 <= i <= k and 1 <= j <= k):
            raise ValueError(f"path component ({i}, {j}) outside [1, {k}]")
        scale = k ** (length - idx)
        p += scale * (i - 1)
        q += scale * (j - 1)
    return p, q


def region_origin(path: tuple[tuple[int, int], ...], k: int, padded_n: int) -> tuple[int, int, int]:
    """0-based top-left cell and side length of the block addressed by ``path``."""
    r = c = 0
    size = padded_n
    for i, j in path:
        size //= k
        r += (i - 1) * size
        c += (j - 1) * size
    return r, c, size


def prune(t: K2Tree) -> K2Tree:
    """Drop every subtree strictly above the diagonal.

    A node survives iff its block position satisfies ``p >= q``; under a
    diagonal node only children with ``i >= j`` remain.
    """
    if t.pruned:
        raise ValueError("tree is already pruned")
    old = t.nodes
    new_nodes = [TreeNode(attr=old[0].attr, depth=0, order=None, parent=None)]
    if not old[0].children:
        return replace(t, nodes=new_nodes, pruned=True)
    queue = deque([(0, 0, True)])  # (old id, new id, diagonal flag)
    while queue:
        ouid, nuid, diag = queue.popleft()
        kept = []
        for cid in old[ouid].children:
            child = old[cid]
            i, j = child.order
            if diag and i < j:
                continue
            nid = len(new_nodes)
            new_nodes.append(TreeNode(attr=child.attr, depth=child.depth,
                                      order=child.order, parent=nuid))
            kept.append(nid)
            if child.children:
                queue.append((cid, nid, diag and i == j))
        new_nodes[nuid].children = tuple(kept)
    return replace(t, nodes=new_nodes, pruned=True)


def unprune(t: K2Tree) -> K2Tree:
    """Restore the full tree of a pruned one by mirroring across the diagonal.

    The full tree of a matrix is unique, so it is rebuilt from the symmetrized
    matrix recovered from the pruned tree's leaves.
    """
    if not t.pruned:
        raise ValueError("tree is not pruned")
    mat = rebuild_matrix(t)
    return build_from_matrix(mat, t.k, t.original_n, featured=t.featured,
                             node_vocab=t.node_vocab, edge_vocab=t.edge_vocab)


def flatten_tokenize(t: K2Tree) -> TokenSequence:
    """Breadth-first token sequence of a pruned tree, one token per internal node."""
    if not t.pruned:
        raise ValueError("flatten_tokenize expects a pruned tree")
    root = t.nodes[t.root]
    if not root.children:
        raise EmptyGraphError("all-zero matrix has no token sequence")
    tokens = []
    queue = deque([(t.root, True)])
    while queue:
        uid, diag = queue.popleft()
        node = t.nodes[uid]
        values = tuple(t.nodes[cid].attr for cid in node.children)
        tokens.append(Token(kind=DIAGONAL if diag else OFFDIAGONAL, values=values))
        for cid in node.children:
            child = t.nodes[cid]
            if child.children:
                i, j = child.order
                queue.append((cid, diag and i == j))
    return TokenSequence(k=t.k, padded_n=t.padded_n, original_n=t.original_n,
                         featured=t.featured, node_vocab=t.node_vocab,
                         edge_vocab=t.edge_vocab, tokens=tuple(tokens))


def element_rules(k: int, original_n: int, featured: bool, node_vocab: int,
                  edge_vocab: int, parent_diag: bool, r0: int, c0: int,
                  block: int) -> tuple[frozenset[int], ...]:
    """Admissible attribute values for each pending child slot.

    ``(r0, c0, block)`` is the parent's region.  A slot whose sub-block cannot
    hold any nonzero cell of a valid matrix (padding, or a diagonal block with
    fewer than two real ids in a plain tree) admits only 0.  In a featured tree
    a diagonal block inside the real region is forced nonzero because every
    node carries a label; at single cells the slot is restricted to the label
    range of its cell kind.
    """
    step = block // k
    at_cells = step == 1
    rules = []
    for i, j in child_orders(k, parent_diag):
        r = r0 + (i - 1) * step
        c = c0 + (j - 1) * step
        on_diag = parent_diag and i == j
        if r >= original_n or c >= original_n:
            rules.append(frozenset({0}))
        elif not featured:
            if on_diag and min(r + step, original_n) - r < 2:
                rules.append(frozenset({0}))
            else:
                rules.append(frozenset({0, 1}))
        elif at_cells:
            if on_diag:
                rules.append(frozenset(range(1, node_vocab + 1)))
            else:
                rules.append(frozenset({0}) | frozenset(range(node_vocab + 1, node_vocab + edge_vocab + 1)))
        else:
            rules.append(frozenset({1}) if on_diag else frozenset({0, 1}))
    return tuple(rules)


@dataclass(frozen=True)
class StepResult:
    status: str  # "need_more" or "complete"
    next_kind: str | None
    next_path: tuple[tuple[int, int], ...] | None


@dataclass
class _Pending:
    uid: int
    path: tuple[tuple[int, int], ...]
    diag: bool
    r0: int
    c0: int
    block: int
    depth: int


class IncrementalBuilder:
    """FIFO reconstruction of a pruned tree from tokens.

    Starts from a root with attribute 1 and a queue holding the root;
    each step pops the front node, attaches one sibling group, and pushes
    children that still need expansion.  The tree is complete exactly when the
    queue empties.  The builder must not be reused after a step raises.
    """

    def __init__(self, k: int, padded_n: int, original_n: int | None = None,
                 featured: bool = False, node_vocab: int = 0, edge_vocab: int = 0):
        if k < 2:
            raise ValueError("k must be >= 2")
        if padded_n != padded_size(padded_n, k) or padded_n < k:
            raise SequenceError(f"padded size {padded_n} is not a power of {k}")
        original_n = padded_n if original_n is None else original_n
        if not 1 <= original_n <= padded_n:
            raise SequenceError(f"original size {original_n} outside [1, {padded_n}]")
        self.k = k
        self.padded_n = padded_n
        self.original_n = original_n
        self.featured = featured
        self.node_vocab = node_vocab
        self.edge_vocab = edge_vocab
        self.nodes = [TreeNode(attr=1, depth=0, order=None, parent=None)]
        self.queue: deque[_Pending] = deque(
            [_Pending(uid=0, path=(), diag=True, r0=0, c0=0, block=padded_n, depth=0)])
        self.steps = 0

    @property
    def complete(self) -> bool:
        return not self.queue

    @property
    def next_kind(self) -> str | None:
        if not self.queue:
            return None
        return DIAGONAL if self.queue[0].diag else OFFDIAGONAL

    @property
    def next_path(self) -> tuple[tuple[int, int], ...] | None:
        if not self.queue:
            return None
        return self.queue[0].path

    @property
    def next_depth(self) -> int | None:
        """Depth of the sibling group the next token will attach."""
        if not self.queue:
            return None
        return self.queue[0].depth + 1

    def next_rules(self) -> tuple[frozenset[int], ...]:
        if not self.queue:
            raise TrailingTokensError("no pending node")
        front = self.queue[0]
        return element_rules(self.k, self.original_n, self.featured, self.node_vocab,
                             self.edge_vocab, front.diag, front.r0, front.c0, front.block)

    def step(self, token: Token) -> StepResult:
        """Attach one token; raises a :class:`SequenceError` subclass on misuse."""
        if not self.queue:
            raise TrailingTokensError("token after the tree completed")
        front = self.queue[0]
        expected = DIAGONAL if front.diag else OFFDIAGONAL
        if token.kind != expected:
            raise TokenMismatchError(
                f"token {self.steps + 1}: kind {token.kind!r} where {expected!r} is pending")
        orders = child_orders(self.k, front.diag)
        if len(token.values) != len(orders):
            raise TokenMismatchError(
                f"token {self.steps + 1}: arity {len(token.values)} where {len(orders)} is pending")
        rules = self.next_rules()
        for slot, (value, allowed) in enumerate(zip(token.values, rules)):
            if value not in allowed:
                raise InvalidTokenError(
                    f"token {self.steps + 1}: value {value} not allowed at slot {slot}")
        if all(v == 0 for v in token.values):
            raise InvalidTokenError(
                f"token {self.steps + 1}: all-zero sibling group under a nonzero node")

        self.queue.popleft()
        step = front.block // self.k
        depth = front.depth + 1
        child_ids = []
        for (i, j), value in zip(orders, token.values):
            vid = len(self.nodes)
            self.nodes.append(TreeNode(attr=value, depth=depth, order=(i, j), parent=front.uid))
            child_ids.append(vid)
            if step > 1 and value == 1:
                self.queue.append(_Pending(
                    uid=vid, path=front.path + ((i, j),), diag=front.diag and i == j,
                    r0=front.r0 + (i - 1) * step, c0=front.c0 + (j - 1) * step,
                    block=step, depth=depth))
        self.nodes[front.uid].children = tuple(child_ids)
        self.steps += 1
        return StepResult(status="complete" if not self.queue else "need_more",
                          next_kind=self.next_kind, next_path=self.next_path)

    def tree(self) -> K2Tree:
        if not self.complete:
            raise TruncatedSequenceError(
                f"{len(self.queue)} nodes still pending after {self.steps} tokens")
        return K2Tree(k=self.k, padded_n=self.padded_n, original_n=self.original_n,
                      nodes=self.nodes, featured=self.featured,
                      node_vocab=self.node_vocab, edge_vocab=self.edge_vocab, pruned=True)


def _empty_tree(s: TokenSequence) -> K2Tree:
    return K2Tree(k=s.k, padded_n=s.padded_n, original_n=s.original_n,
                  nodes=[TreeNode(attr=0, depth=0, order=None, parent=None)],
                  featured=s.featured, node_vocab=s.node_vocab,
                  edge_vocab=s.edge_vocab, pruned=True)


def detokenize_build(s: TokenSequence) -> K2Tree:
    """Rebuild the pruned tree from a token sequence; inverse of flatten_tokenize.

    A header-only sequence (zero tokens) denotes the all-zero matrix and yields
    a root-leaf tree.
    """
    if not s.tokens:
        return _empty_tree(s)
    builder = IncrementalBuilder(s.k, s.padded_n, s.original_n, s.featured,
                                 s.node_vocab, s.edge_vocab)
    for token in s.tokens:
        builder.step(token)
    return builder.tree()


def position_paths(s: TokenSequence) -> list[tuple[tuple[int, int], ...]]:
    """Per-token root-to-parent paths in unpruned ``(i, j)`` coordinates.

    The first token expands the root, so its path is empty.  The sequence is
    validated as a side effect.
    """
    if not s.tokens:
        return []
    builder = IncrementalBuilder(s.k, s.padded_n, s.original_n, s.featured,
                                 s.node_vocab, s.edge_vocab)
    paths = []
    for token in s.tokens:
        paths.append(builder.next_path)
        builder.step(token)
    builder.tree()
    return paths


class Vocabulary:
    """Token ids for one ``k``: 0..2 are BOS/EOS/PAD, then all diagonal bit
    patterns, then all off-diagonal bit patterns, then any registered featured
    (label-valued) tokens.

    Bit patterns are read as binary numbers with the first element (lowest
    sibling rank) most significant.  Diagonal and off-diagonal tokens with the
    same bits get distinct ids.  Featured tokens whose values happen to be all
    binary coincide with structural tokens and share their ids.
    """

    BOS = BOS
    EOS = EOS
    PAD = PAD

    def __init__(self, k: int, featured_tokens: tuple[Token, ...] = ()):
        if k < 2:
            raise ValueError("k must be >= 2")
        self.k = k
        self.diag_arity = diagonal_arity(k)
        self.off_arity = offdiagonal_arity(k)
        self._diag_base = _SPECIALS
        self._off_base = self._diag_base + (1 << self.diag_arity)
        self._ext_base = self._off_base + (1 << self.off_arity)
        ext = sorted({t for t in featured_tokens if not self._is_structural(t)},
                     key=lambda t: (t.kind, t.values))
        self.featured_tokens = tuple(ext)
        self._ext_ids = {t: self._ext_base + i for i, t in enumerate(ext)}

    def _is_structural(self, token: Token) -> bool:
        arity = self.diag_arity if token.kind == DIAGONAL else self.off_arity
        return len(token.values) == arity and all(v in (0, 1) for v in token.values)

    @property
    def core_size(self) -> int:
        """Number of structural tokens: 2**(k*k) + 2**(k*(k+1)/2)."""
        return (1 << self.off_arity) + (1 << self.diag_arity)

    @property
    def size(self) -> int:
        """Total id count including the three reserved ids and featured tokens."""
        return self._ext_base + len(self.featured_tokens)

    def encode(self, token: Token) -> int:
        if self._is_structural(token):
            value = 0
            for v in token.values:
                value = (value << 1) | v
            base = self._diag_base if token.kind == DIAGONAL else self._off_base
            return base + value
        try:
            return self._ext_ids[token]
        except KeyError:
            raise SequenceError(f"token {token} is not in the vocabulary") from None

    def decode(self, token_id: int) -> Token:
        if self._diag_base <= token_id < self._off_base:
            return self._bits_token(DIAGONAL, token_id - self._diag_base, self.diag_arity)
        if self._off_base <= token_id < self._ext_base:
            return self._bits_token(OFFDIAGONAL, token_id - self._off_base, self.off_arity)
        if self._ext_base <= token_id < self.size:
            return self.featured_tokens[token_id - self._ext_base]
        raise SequenceError(f"id {token_id} is reserved or out of range")

    @staticmethod
    def _bits_token(kind: str, value: int, arity: int) -> Token:
        bits = tuple((value >> (arity - 1 - m)) & 1 for m in range(arity))
        return Token(kind=kind, values=bits)

    def ids_of_kind(self, kind: str) -> range | list[int]:
        if kind == DIAGONAL:
            return range(self._diag_base, self._off_base)
        return range(self._off_base, self._ext_base)

    @classmethod
    def from_corpus(cls, k: int, sequences: list[TokenSequence]) -> "Vocabulary":
        """Structural tokens plus every label-valued token seen in the corpus."""
        seen: set[Token] = set()
        for s in sequences:
            if s.k != k:
                raise SequenceError(f"sequence with k={s.k} in a k={k} corpus")
            seen.update(s.tokens)
        return cls(k, tuple(seen))


def encode_ids(s: TokenSequence, vocab: Vocabulary) -> list[int]:
    return [vocab.encode(t) for t in s.tokens]


def write_token_stream(s: TokenSequence) -> str:
    """Line-oriented text form.

    Line 1: ``K PADDED_N ORIGINAL_N FEATURED``.  Line 2 (featured only): node
    and edge label vocab sizes.  Next line: whitespace-separated tokens,
    ``d:``/``o:`` prefixed, values comma-separated for featured streams and
    concatenated bits otherwise; empty for a header-only sequence.  An optional
    trailing ``perm`` line records the node ordering applied before encoding.
    """
    lines = [f"{s.k} {s.padded_n} {s.original_n} {int(s.featured)}"]
    if s.featured:
        lines.append(f"{s.node_vocab} {s.edge_vocab}")
    if s.featured:
        toks = [f"{t.kind}:" + ",".join(str(v) for v in t.values) for t in s.tokens]
    else:
        toks = [f"{t.kind}:" + "".join(str(v) for v in t.values) for t in s.tokens]
    lines.append(" ".join(toks))
    if s.perm is not None:
        lines.append("perm " + " ".join(str(p) for p in s.perm))
    return "\n".join(lines) + "\n"


def read_token_stream(text: str) -> TokenSequence:
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SequenceError("empty token stream")
    head = lines[0].split()
    if len(head) != 4:
        raise SequenceError("header must be 'K PADDED_N ORIGINAL_N FEATURED'")
    try:
        k, padded_n, original_n, featured_flag = (int(f) for f in head)
    except ValueError:
        raise SequenceError("non-integer field in header") from None
    if featured_flag not in (0, 1):
        raise SequenceError(f"featured flag must be 0 or 1, got {featured_flag}")
    featured = bool(featured_flag)
    idx = 1
    node_vocab = edge_vocab = 0
    if featured:
        if len(lines) < 2:
            raise SequenceError("featured stream is missing the label vocab line")
        vocab_fields = lines[idx].split()
        if len(vocab_fields) != 2:
            raise SequenceError("label vocab line must be 'NODE_VOCAB EDGE_VOCAB'")
        try:
            node_vocab, edge_vocab = int(vocab_fields[0]), int(vocab_fields[1])
        except ValueError:
            raise SequenceError("non-integer label vocab size") from None
        idx += 1
    token_text = lines[idx] if idx < len(lines) else ""
    idx += 1
    tokens = tuple(_parse_token(word, featured) for word in token_text.split())
    perm = None
    if idx < len(lines):
        fields = lines[idx].split()
        if not fields or fields[0] != "perm":
            raise SequenceError(f"unexpected trailing line {idx + 1}")
        try:
            perm = tuple(int(f) for f in fields[1:])
        except ValueError:
            raise SequenceError("non-integer entry in perm line") from None
        idx += 1
    if idx < len(lines):
        raise SequenceError(f"unexpected trailing line {idx + 1}")
    return TokenSequence(k=k, padded_n=padded_n, original_n=original_n,
                         featured=featured, node_vocab=node_vocab,
                         edge_vocab=edge_vocab, tokens=tokens, perm=perm)


def _parse_token(word: str, featured: bool) -> Token:
    if len(word) < 2 or word[1] != ":" or word[0] not in (DIAGONAL, OFFDIAGONAL):
        raise SequenceError(f"malformed token {word!r}")
    body = word[2:]
    try:
        if featured:
            values = tuple(int(v) for v in body.split(","))
        else:
            values = tuple(int(ch) for ch in body)
    except ValueError:
        raise SequenceError(f"malformed token {word!r}") from None
    if not values:
        raise SequenceError(f"malformed token {word!r}")
    if not featured and any(v not in (0, 1) for v in values):
        raise SequenceError(f"non-binary value in plain token {word!r}")
    return Token(kind=word[0], values=values)


def encode_graph(g: Graph, k: int, ordering: str = "identity",
                 reverse: bool = False) -> TokenSequence:
    """Full encode pipeline: order, build, prune, flatten.

    The all-zero case (a plain graph with no edges) becomes a header-only
    sequence.  With a non-identity ordering the permutation is stored on the
    sequence so :func:`decode_graph` can restore original node ids.
    """
    perm = None
    if ordering != "identity":
        perm = order_nodes(g, ordering, reverse=reverse)
        g = apply_ordering(g, perm)
    t = build_k2tree(g, k)
    if not t.nodes[t.root].children:
        return TokenSequence(k=k, padded_n=t.padded_n, original_n=t.original_n,
                             featured=t.featured, node_vocab=t.node_vocab,
                             edge_vocab=t.edge_vocab, tokens=(), perm=perm)
    s = flatten_tokenize(prune(t))
    return replace(s, perm=perm)


def decode_graph(s: TokenSequence) -> Graph:
    """Inverse of :func:`encode_graph`, undoing any stored node ordering."""
    g = rebuild_graph(detokenize_build(s))
    if s.perm is not None:
        g = apply_ordering(g, invert_permutation(s.perm))
    return g
