"""FastAPI application and the `victim-server` entry point.

Configuration is environment-only so the server drops into any deployment:

    VICTIM_MODEL_PATH   checkpoint directory (required)
    VICTIM_DEVICE       torch device, default "cpu"
    VICTIM_PORT         listen port, default 8731
    VICTIM_HOST         bind address, default "127.0.0.1"
    VICTIM_MAX_LENGTH   override the tokenizer/model input limit
    VICTIM_BATCH_SIZE   inference batch size, default 32
"""

from __future__ import annotations

import os
import sys

from fastapi import FastAPI
from pydantic import BaseModel

from .model import VictimModel


class TextsRequest(BaseModel):
    texts: list[str]


def create_app(model: VictimModel) -> FastAPI:
    app = FastAPI(title="victim-server", version="0.1.0")

    @app.get("/labels")
    def labels() -> dict:
        return {"labels": list(model.labels)}

    @app.post("/predict")
    def predict(req: TextsRequest) -> dict:
        probs, truncated = model.predict(req.texts)
        return {"labels": list(model.labels), "probs": probs, "truncated": truncated}

    @app.post("/embed")
    def embed(req: TextsRequest) -> dict:
        vectors, truncated = model.embed(req.texts)
        return {"vectors": vectors, "truncated": truncated}

    return app


def main() -> int:
    model_path = os.environ.get("VICTIM_MODEL_PATH")
    if not model_path:
        print("victim-server: set VICTIM_MODEL_PATH to a checkpoint directory", file=sys.stderr)
        return 2
    try:
        model = VictimModel(
            model_path,
            device=os.environ.get("VICTIM_DEVICE", "cpu"),
            max_length=int(os.environ["VICTIM_MAX_LENGTH"]) if "VICTIM_MAX_LENGTH" in os.environ else None,
            batch_size=int(os.environ.get("VICTIM_BATCH_SIZE", "32")),
        )
    except (OSError, ValueError) as exc:
        print(f"victim-server: cannot load model: {exc}", file=sys.stderr)
        return 2

    import uvicorn

    uvicorn.run(
        create_app(model),
        host=os.environ.get("VICTIM_HOST", "127.0.0.1"),
        port=int(os.environ.get("VICTIM_PORT", "8731")),
        log_level="info",
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
