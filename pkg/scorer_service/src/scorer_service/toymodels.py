"""Desk-scale checkpoints for running the service without a model hub.

Builds word-level tokenizers and trains two tiny models on synthetic
polar sentences:

* a causal LM (serves both the classifier and fluency roles) trained on
  plain sentences and on classification-prompt lines ending in the
  polarity word, so next-word prediction after "is :" carries real
  signal;
* a masked-LM encoder trained briefly with random masking so slot
  predictions and embeddings are not pure noise.

Usage: ``python -m scorer_service.toymodels --out DIR`` then point
SCORER_MODEL_CLS / SCORER_MODEL_LM at DIR/causal and SCORER_MODEL_ENC
at DIR/encoder.  Real checkpoints plug in the same way.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import (
    GPT2Config,
    GPT2LMHeadModel,
    PreTrainedTokenizerFast,
    RobertaConfig,
    RobertaForMaskedLM,
)

SPECIALS = ["<unk>", "<s>", "</s>", "<pad>", "<mask>"]
POSITIVE = ["good", "great", "happy", "tasty", "clean", "fresh", "friendly", "fast"]
NEGATIVE = ["bad", "terrible", "sad", "bland", "dirty", "stale", "rude", "slow"]
NOUNS = ["food", "service", "place", "staff", "room", "coffee", "music", "crowd"]
FILLERS = ["the", "was", "is", "really", "very", "so", "and", "here", "a"]
PROMPT_WORDS = ["The", "sentiment", "of", "text", "{", "}", ":", "positive", "negative"]


def vocabulary() -> list[str]:
    seen: dict[str, None] = {}
    for word in POSITIVE + NEGATIVE + NOUNS + FILLERS + PROMPT_WORDS:
        seen.setdefault(word, None)
    return list(seen)


def make_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {tok: i for i, tok in enumerate(SPECIALS + vocabulary())}
    core = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    core.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="<unk>",
        bos_token="<s>",
        eos_token="</s>",
        pad_token="<pad>",
        mask_token="<mask>",
    )


def sample_sentence(rng: random.Random, positive: bool) -> str:
    polar = POSITIVE if positive else NEGATIVE
    tokens = ["the", rng.choice(NOUNS), rng.choice(["was", "is"])]
    if rng.random() < 0.6:
        tokens.append(rng.choice(["really", "very", "so"]))
    tokens.append(rng.choice(polar))
    if rng.random() < 0.3:
        tokens += ["and", rng.choice([w for w in polar if w != tokens[-1]])]
    return " ".join(tokens)


def training_lines(count: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    lines = []
    for _ in range(count):
        positive = rng.random() < 0.5
        sentence = sample_sentence(rng, positive)
        label = "positive" if positive else "negative"
        if rng.random() < 0.7:
            lines.append(f"The sentiment of the text {{ {sentence} }} is : {label}")
        else:
            lines.append(sentence)
    return lines


def _batches(ids_list, batch_size, pad_id):
    for start in range(0, len(ids_list), batch_size):
        chunk = ids_list[start : start + batch_size]
        width = max(len(ids) for ids in chunk)
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(chunk), width), dtype=torch.long)
        for row, ids in enumerate(chunk):
            input_ids[row, : len(ids)] = torch.tensor(ids)
            attention[row, : len(ids)] = 1
        yield input_ids, attention


def train_causal(tokenizer, lines, epochs: int = 12, seed: int = 0) -> GPT2LMHeadModel:
    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=tokenizer.vocab_size,
        n_positions=64,
        n_embd=64,
        n_layer=2,
        n_head=2,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    model = GPT2LMHeadModel(config)
    optimizer = torch.optim.AdamW(model.parameters(), lr=5e-3)
    encoded = [
        [tokenizer.bos_token_id]
        + tokenizer.encode(line, add_special_tokens=False)
        + [tokenizer.eos_token_id]
        for line in lines
    ]
    model.train()
    for _ in range(epochs):
        for input_ids, attention in _batches(encoded, 64, tokenizer.pad_token_id):
            labels = input_ids.masked_fill(attention == 0, -100)
            loss = model(input_ids, attention_mask=attention, labels=labels).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    model.eval()
    return model


def train_masked(tokenizer, lines, epochs: int = 6, seed: int = 1) -> RobertaForMaskedLM:
    torch.manual_seed(seed)
    config = RobertaConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=128,
        max_position_embeddings=80,
        pad_token_id=tokenizer.pad_token_id,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    model = RobertaForMaskedLM(config)
    optimizer = torch.optim.AdamW(model.parameters(), lr=3e-3)
    rng = random.Random(seed)
    encoded = [
        [tokenizer.bos_token_id]
        + tokenizer.encode(line, add_special_tokens=False)
        + [tokenizer.eos_token_id]
        for line in lines
    ]
    model.train()
    for _ in range(epochs):
        for input_ids, attention in _batches(encoded, 64, tokenizer.pad_token_id):
            masked = input_ids.clone()
            labels = torch.full_like(input_ids, -100)
            for row in range(input_ids.shape[0]):
                length = int(attention[row].sum())
                for column in range(1, length - 1):  # keep bos/eos intact
                    if rng.random() < 0.2:
                        labels[row, column] = input_ids[row, column]
                        masked[row, column] = tokenizer.mask_token_id
            loss = model(masked, attention_mask=attention, labels=labels).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    model.eval()
    return model


def build_checkpoints(out_dir: str | Path, samples: int = 1500, seed: int = 0) -> Path:
    out = Path(out_dir)
    tokenizer = make_tokenizer()
    lines = training_lines(samples, seed)
    plain = [line for line in lines if not line.startswith("The sentiment")]

    causal_dir = out / "causal"
    causal = train_causal(tokenizer, lines, seed=seed)
    causal.save_pretrained(causal_dir)
    tokenizer.save_pretrained(causal_dir)

    encoder_dir = out / "encoder"
    encoder = train_masked(tokenizer, plain or lines, seed=seed + 1)
    encoder.save_pretrained(encoder_dir)
    tokenizer.save_pretrained(encoder_dir)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="build toy scorer checkpoints")
    parser.add_argument("--out", required=True)
    parser.add_argument("--samples", type=int, default=1500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    out = build_checkpoints(args.out, samples=args.samples, seed=args.seed)
    print(f"checkpoints written to {out}/causal and {out}/encoder")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
