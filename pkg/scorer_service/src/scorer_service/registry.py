"""Model registry: loads the configured checkpoints at startup.

Configuration comes from environment variables:

    SCORER_MODEL_CLS  causal LM used as the prompted style classifier
    SCORER_MODEL_LM   causal LM used for token log-probabilities
    SCORER_MODEL_ENC  masked-LM encoder for embeddings and candidates
    SCORER_PORT       listen port (server launcher only, default 8301)
    SCORER_TOKEN      optional static bearer token
    SCORER_DEVICE     torch device, default "cpu"

Any missing or unloadable model aborts startup.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import torch
from transformers import (
    AutoModelForCausalLM,
    AutoModelForMaskedLM,
    AutoTokenizer,
)

MAX_BATCH = 256


class RegistryError(RuntimeError):
    pass


@dataclass
class CausalModel:
    tokenizer: object
    model: object

    @property
    def start_token_id(self) -> int:
        token_id = self.tokenizer.bos_token_id
        if token_id is None:
            token_id = self.tokenizer.eos_token_id
        if token_id is None:
            raise RegistryError("causal LM tokenizer needs a BOS or EOS token")
        return token_id


@dataclass
class MaskedModel:
    tokenizer: object
    model: object

    @property
    def mask_token_id(self) -> int:
        token_id = self.tokenizer.mask_token_id
        if token_id is None:
            raise RegistryError("encoder tokenizer needs a mask token")
        return token_id


class ModelRegistry:
    """Holds the three model handles on one device, eval mode."""

    def __init__(
        self,
        cls_path: str,
        lm_path: str,
        enc_path: str,
        device: str = "cpu",
        token: str | None = None,
    ):
        self.device = torch.device(device)
        self.token = token
        self.max_batch = MAX_BATCH
        try:
            self.classifier = CausalModel(
                AutoTokenizer.from_pretrained(cls_path),
                AutoModelForCausalLM.from_pretrained(cls_path),
            )
            self.fluency = (
                self.classifier
                if lm_path == cls_path
                else CausalModel(
                    AutoTokenizer.from_pretrained(lm_path),
                    AutoModelForCausalLM.from_pretrained(lm_path),
                )
            )
            self.encoder = MaskedModel(
                AutoTokenizer.from_pretrained(enc_path),
                AutoModelForMaskedLM.from_pretrained(enc_path),
            )
        except Exception as err:  # refuse to start on any load failure
            raise RegistryError(f"model loading failed: {err}") from err
        for handle in (self.classifier, self.fluency, self.encoder):
            handle.model.to(self.device)
            handle.model.eval()
        # startup checks so misconfiguration fails fast
        _ = self.classifier.start_token_id
        _ = self.fluency.start_token_id
        _ = self.encoder.mask_token_id

    @classmethod
    def from_env(cls) -> "ModelRegistry":
        paths = {}
        for key in ("SCORER_MODEL_CLS", "SCORER_MODEL_LM", "SCORER_MODEL_ENC"):
            value = os.environ.get(key)
            if not value:
                raise RegistryError(f"environment variable {key} is required")
            paths[key] = value
        return cls(
            cls_path=paths["SCORER_MODEL_CLS"],
            lm_path=paths["SCORER_MODEL_LM"],
            enc_path=paths["SCORER_MODEL_ENC"],
            device=os.environ.get("SCORER_DEVICE", "cpu"),
            token=os.environ.get("SCORER_TOKEN") or None,
        )
