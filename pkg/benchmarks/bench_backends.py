#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the three hot paths (context-hash embedding, perceptron training,
bulk prediction) on a synthetic corpus and prints per-backend timings
with speedups.  The first numba call includes JIT compilation (cached
afterwards), so a warmup call precedes timing.

Usage: python benchmarks/bench_backends.py [--sentences 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from spellcl.corpus import ConfusionSet, Corpus, Sample, inject_errors
from spellcl.curriculum import arrange_shuffled_baseline
from spellcl.embed import HashedEmbedder
from spellcl.model import encode_corpus, predict_encoded, train_encoded


def synth(n_sentences: int, vocab_size: int = 50, seed: int = 0):
    rng = np.random.default_rng(seed)
    vocab = [chr(0x4E00 + i) for i in range(vocab_size)]
    entries = {}
    for _ in range(100):
        a, b = rng.integers(0, vocab_size, size=2)
        if a != b:
            entries.setdefault(vocab[a], set()).add(vocab[b])
            entries.setdefault(vocab[b], set()).add(vocab[a])
    confusion = ConfusionSet(entries)
    samples = []
    for i in range(n_sentences):
        n = int(rng.integers(8, 21))
        text = "".join(vocab[int(c)] for c in rng.integers(0, vocab_size, size=n))
        samples.append(Sample(id=f"b{i:05d}", source=text, target=text))
    clean = Corpus(samples=tuple(samples), name="bench")
    return inject_errors(clean, confusion, 0.1, seed=1), confusion


def timeit(fn, repeats: int) -> float:
    fn()  # warmup (includes JIT compile on the numba path)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sentences", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--dim", type=int, default=64)
    args = parser.parse_args()

    corpus, confusion = synth(args.sentences)
    n_chars = sum(len(s.source) for s in corpus)
    print(f"corpus: {len(corpus)} sentences, {n_chars} characters\n")

    enc = encode_corpus(corpus, confusion)
    manifest = arrange_shuffled_baseline(corpus.ids(), seed=0)
    _, averaged, _ = train_encoded(enc, manifest, backend="numba")

    jobs = {
        "hash-embed": lambda backend: lambda: [
            HashedEmbedder(dim=args.dim, backend=backend).embed_side(s, "source")
            for s in corpus
        ],
        "train-epoch": lambda backend: lambda: train_encoded(
            enc, manifest, backend=backend
        ),
        "bulk-predict": lambda backend: lambda: predict_encoded(
            enc, corpus, averaged, backend=backend
        ),
    }

    print(f"{'kernel':<14}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, make in jobs.items():
        t_numba = timeit(make("numba"), args.repeats)
        t_numpy = timeit(make("numpy"), args.repeats)
        print(f"{name:<14}{t_numba * 1e3:>10.1f}ms{t_numpy * 1e3:>10.1f}ms"
              f"{t_numpy / t_numba:>9.1f}x")


if __name__ == "__main__":
    main()
