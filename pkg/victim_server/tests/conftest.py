import pytest
import torch
from fastapi.testclient import TestClient
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast

from victim_server import VictimModel, create_app

# consonant range used for the character-level test vocabulary
TIBETAN = [chr(cp) for cp in range(0x0F40, 0x0F6B) if cp != 0x0F48]
LABELS = ("politics", "economy", "culture")


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A tiny randomly-initialized classifier checkpoint with fixed seeds.

    Character-level WordPiece over Tibetan letters (every letter appears both
    bare and as a ## continuation), 2 layers, hidden size 32, 3 labels, input
    limit 16 tokens. Small enough to train nothing and test everything.
    """
    out = tmp_path_factory.mktemp("victim-checkpoint")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "་"]
    vocab += TIBETAN + [f"##{c}" for c in TIBETAN]
    (out / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(
        str(out / "vocab.txt"), do_lower_case=False, model_max_length=16
    )
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=32,
        num_labels=len(LABELS),
        id2label=dict(enumerate(LABELS)),
        label2id={name: i for i, name in enumerate(LABELS)},
    )
    model = BertForSequenceClassification(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def victim(checkpoint):
    return VictimModel(checkpoint)


@pytest.fixture(scope="session")
def client(victim):
    return TestClient(create_app(victim))
