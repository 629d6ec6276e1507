#!/usr/bin/env python3
"""Serve per-layer attention for a focal token over HTTP.

Endpoint: POST /v1/attention
  request:  {"prompt": str, "chunk_text": str, "model": str?}
  response: {"focal_token": str, "prompt_token_count": int,
             "context_range": [begin, end],
             "attentions": [layers][heads][positions]}

The focal token is greedily decoded after the prompt; its attention rows are
taken from a second forward pass with the focal token appended, sliced back to
the prompt positions. context_range is the chunk_text span under this model's
tokenizer, so the client scores the right positions regardless of how it
chunked the text. Prompts over the window produce a 413.

Pair with the C++ side via:
  ATTNRAG_ATTENTION_URL=http://127.0.0.1:8700

Requires torch + transformers. Attention output needs the eager
implementation; flash/sdpa kernels do not materialize the weights.
"""

import argparse
import json
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer


class AttentionBackend:
    def __init__(self, model_name: str, device: str, max_prompt_tokens: int):
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModelForCausalLM.from_pretrained(
            model_name, attn_implementation="eager", torch_dtype=torch.float32
        )
        self.model.to(device)
        self.model.eval()
        self.device = device
        window = getattr(self.model.config, "max_position_embeddings", 0) or 0
        self.max_prompt_tokens = max_prompt_tokens or window

    def token_span(self, offsets, text: str, needle: str):
        """Token range covering the first occurrence of needle in text."""
        char_begin = text.find(needle)
        if char_begin < 0 or not needle:
            return None
        char_end = char_begin + len(needle)
        begin = end = None
        for i, (lo, hi) in enumerate(offsets):
            if lo == hi:  # special token
                continue
            if hi > char_begin and begin is None:
                begin = i
            if lo < char_end:
                end = i + 1
        if begin is None or end is None or begin >= end:
            return None
        return [begin, end]

    @torch.no_grad()
    def run(self, prompt: str, chunk_text: str) -> dict:
        encoded = self.tokenizer(
            prompt, return_offsets_mapping=True, return_tensors="pt"
        )
        input_ids = encoded["input_ids"].to(self.device)
        prompt_len = input_ids.shape[1]
        if self.max_prompt_tokens and prompt_len > self.max_prompt_tokens:
            raise OversizeError(
                f"prompt is {prompt_len} tokens; window is {self.max_prompt_tokens}"
            )

        logits = self.model(input_ids).logits
        next_id = int(torch.argmax(logits[0, -1]))
        focal = self.tokenizer.decode([next_id]).strip()

        extended = torch.cat(
            [input_ids, torch.tensor([[next_id]], device=self.device)], dim=1
        )
        outputs = self.model(extended, output_attentions=True)

        attentions = []
        for layer in outputs.attentions:
            rows = layer[0, :, -1, :prompt_len]  # focal row per head
            attentions.append([head.tolist() for head in rows])

        body = {
            "focal_token": focal,
            "prompt_token_count": prompt_len,
            "attentions": attentions,
        }
        span = self.token_span(encoded["offset_mapping"][0].tolist(), prompt, chunk_text)
        if span is not None:
            body["context_range"] = span
        return body


class OversizeError(Exception):
    pass


def make_handler(backend: AttentionBackend, api_key: str):
    class Handler(BaseHTTPRequestHandler):
        def reply(self, status: int, body: dict):
            payload = json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_POST(self):
            if self.path != "/v1/attention":
                self.reply(404, {"error": "unknown path"})
                return
            if api_key and self.headers.get("Authorization") != f"Bearer {api_key}":
                self.reply(401, {"error": "bad or missing bearer token"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                request = json.loads(self.rfile.read(length))
                prompt = request["prompt"]
                chunk_text = request.get("chunk_text", "")
            except (KeyError, ValueError) as e:
                self.reply(400, {"error": f"bad request: {e}"})
                return
            try:
                self.reply(200, backend.run(prompt, chunk_text))
            except OversizeError as e:
                self.reply(413, {"error": str(e)})
            except Exception as e:  # surface, don't crash the server
                self.reply(500, {"error": str(e)})

        def log_message(self, fmt, *args):
            print(f"{self.address_string()} {fmt % args}")

    return Handler


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", default="Qwen/Qwen2.5-0.5B-Instruct")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8700)
    parser.add_argument("--device", default="cuda" if torch.cuda.is_available() else "cpu")
    parser.add_argument("--max-prompt-tokens", type=int, default=0,
                        help="0 = use the model's window")
    parser.add_argument("--api-key-env", default="",
                        help="env var holding the bearer token to require")
    args = parser.parse_args()

    api_key = os.environ.get(args.api_key_env, "") if args.api_key_env else ""
    backend = AttentionBackend(args.model, args.device, args.max_prompt_tokens)
    server = ThreadingHTTPServer((args.host, args.port), make_handler(backend, api_key))
    print(f"serving {args.model} on http://{args.host}:{args.port}/v1/attention")
    server.serve_forever()


if __name__ == "__main__":
    main()
