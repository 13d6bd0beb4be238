"""Inference routines behind the four endpoints.

Policies (documented server behavior):

* Style words that tokenize into multiple pieces are scored by the
  probability of their first piece after the prompt; a leading space is
  added so BPE-style vocabularies pick the in-word form.
* Exemplars, when present, are prepended to the prompt separated by
  blank lines.
* Token log-probabilities condition on the tokenizer's BOS (or EOS)
  token; a word's log-probability is the sum over its pieces.
* Embeddings come from the encoder's final hidden layer; multi-piece
  words are mean-pooled and the sentence vector is the mean over word
  vectors.
* Candidates are single-piece predictions at a masked slot, with
  special tokens and non-word pieces filtered out.

All inference runs in eval mode with no sampling, so identical requests
produce identical responses.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from .registry import CausalModel, MaskedModel


def _encode_words(tokenizer, words, spaced: bool = True) -> tuple[list[int], list[int]]:
    """Piece ids for a word sequence plus per-word piece counts."""
    ids: list[int] = []
    counts: list[int] = []
    for i, word in enumerate(words):
        text = (" " + word) if (spaced and i > 0) else word
        pieces = tokenizer.encode(text, add_special_tokens=False)
        if not pieces:
            pieces = [tokenizer.unk_token_id or 0]
        ids.extend(pieces)
        counts.append(len(pieces))
    return ids, counts


def _first_piece_id(tokenizer, word: str) -> int:
    pieces = tokenizer.encode(" " + word, add_special_tokens=False)
    if not pieces:
        pieces = tokenizer.encode(word, add_special_tokens=False)
    if not pieces:
        pieces = [tokenizer.unk_token_id or 0]
    return pieces[0]


def style_probabilities(
    handle: CausalModel,
    prompt: str,
    styles: tuple[str, str],
    exemplars: tuple[str, ...] | None,
    device,
) -> tuple[float, float]:
    """Next-token probabilities of the two style words after the prompt."""
    text = prompt if not exemplars else "\n\n".join(list(exemplars) + [prompt])
    ids = [handle.start_token_id] + handle.tokenizer.encode(text, add_special_tokens=False)
    with torch.no_grad():
        logits = handle.model(torch.tensor([ids], device=device)).logits[0, -1]
        probs = F.softmax(logits.float(), dim=-1)
    return tuple(float(probs[_first_piece_id(handle.tokenizer, word)]) for word in styles)


def token_logprobs(handle: CausalModel, words, device) -> list[float]:
    """Per-word log probability: sum of piece log-probs, BOS-anchored."""
    piece_ids, counts = _encode_words(handle.tokenizer, words)
    ids = [handle.start_token_id] + piece_ids
    with torch.no_grad():
        logits = handle.model(torch.tensor([ids], device=device)).logits[0]
        logprobs = F.log_softmax(logits.float(), dim=-1)
    out: list[float] = []
    position = 0
    for count in counts:
        total = 0.0
        for _ in range(count):
            target = ids[position + 1]
            total += float(logprobs[position, target])
            position += 1
        out.append(min(total, 0.0))
    return out


def embed(handle: MaskedModel, words, device) -> tuple[list[list[float]], list[float]]:
    """Per-word vectors (final hidden layer, pieces mean-pooled) and the
    mean-over-words sentence vector."""
    tokenizer = handle.tokenizer
    piece_ids, counts = _encode_words(tokenizer, words)
    ids = list(piece_ids)
    offset = 0
    if tokenizer.bos_token_id is not None and tokenizer.eos_token_id is not None:
        ids = [tokenizer.bos_token_id] + ids + [tokenizer.eos_token_id]
        offset = 1
    with torch.no_grad():
        output = handle.model(
            torch.tensor([ids], device=device), output_hidden_states=True
        )
        hidden = output.hidden_states[-1][0].float()
    vectors: list[list[float]] = []
    position = offset
    for count in counts:
        vectors.append(hidden[position : position + count].mean(dim=0).tolist())
        position += count
    sentence = torch.tensor(vectors).mean(dim=0).tolist()
    return vectors, sentence


def _is_word_piece(tokenizer, piece_id: int) -> str | None:
    """Decode a piece to a plain word, or None if it is not usable."""
    if piece_id in set(tokenizer.all_special_ids):
        return None
    text = tokenizer.decode([piece_id]).strip()
    if not text or any(ch.isspace() for ch in text):
        return None
    return text


def candidates(
    handle: MaskedModel, words, kind: str, position: int, k: int, device
) -> list[str]:
    """Top-k single-piece predictions at a masked slot."""
    tokenizer = handle.tokenizer
    if kind == "replace":
        context = list(words[:position]) + [None] + list(words[position + 1 :])
    else:
        context = list(words[:position]) + [None] + list(words[position:])
    ids: list[int] = []
    mask_index = -1
    if tokenizer.bos_token_id is not None:
        ids.append(tokenizer.bos_token_id)
    for i, word in enumerate(context):
        if word is None:
            mask_index = len(ids)
            ids.append(handle.mask_token_id)
        else:
            text = (" " + word) if i > 0 else word
            pieces = tokenizer.encode(text, add_special_tokens=False)
            ids.extend(pieces or [tokenizer.unk_token_id or 0])
    if tokenizer.eos_token_id is not None:
        ids.append(tokenizer.eos_token_id)
    with torch.no_grad():
        logits = handle.model(torch.tensor([ids], device=device)).logits[0, mask_index]
    ranked = torch.argsort(logits, descending=True).tolist()
    out: list[str] = []
    for piece_id in ranked:
        word = _is_word_piece(tokenizer, piece_id)
        if word is None or word in out:
            continue
        out.append(word)
        if len(out) == k:
            break
    return out
