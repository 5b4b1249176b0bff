//! Throughput benchmarks pitting the library paths (data-parallel when
//! the default `parallel` feature is on) against inline sequential
//! baselines. Rebuilding with `--no-default-features` makes the library
//! rows take the sequential code path, so both directions of the
//! comparison are observable on the same machine.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use nostra_core::certchain::KeyRing;
use nostra_core::clock::StepClock;
use nostra_core::crypto::{hash_leaf, hash_node, Digest, KeyPair};
use nostra_core::ledger::Ledger;
use nostra_core::merkle::{build_tree, hash_leaves};
use nostra_core::nostrify::{issue_batch, Document, Stamp};
use nostra_core::verify::{verify_document, verify_portfolio};

const DOC_BYTES: usize = 1024;

fn synthetic_docs(count: usize) -> Vec<Vec<u8>> {
    (0..count)
        .map(|i| (0..DOC_BYTES).map(|j| ((i * 31 + j) % 251) as u8).collect())
        .collect()
}

fn sequential_leaves(docs: &[Vec<u8>]) -> Vec<Digest> {
    docs.iter().map(|d| hash_leaf(d)).collect()
}

fn sequential_root(mut level: Vec<Digest>) -> Digest {
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| hash_node(&pair[0], pair.get(1).unwrap_or(&pair[0])))
            .collect();
    }
    level[0]
}

fn bench_leaf_hashing(c: &mut Criterion) {
    let mut group = c.benchmark_group("leaf_hashing");
    for &n in &[64usize, 512, 2048] {
        let docs = synthetic_docs(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("library", n), &docs, |b, docs| {
            b.iter(|| black_box(hash_leaves(docs)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &docs, |b, docs| {
            b.iter(|| black_box(sequential_leaves(docs)))
        });
    }
    group.finish();
}

fn bench_tree_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_build");
    for &n in &[64usize, 512, 2048] {
        let leaves = hash_leaves(&synthetic_docs(n));
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("library", n), &leaves, |b, leaves| {
            b.iter(|| black_box(build_tree(leaves.clone()).unwrap().root()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &leaves, |b, leaves| {
            b.iter(|| black_box(sequential_root(leaves.clone())))
        });
    }
    group.finish();
}

fn bench_portfolio_verify(c: &mut Criterion) {
    let clock = StepClock::new(1_750_000_000, 1);
    let issuer = KeyPair::from_seed(&[7u8; 32]).unwrap();
    let mut ring = KeyRing::new();
    ring.insert_by_key_id(issuer.public().clone());
    let docs: Vec<Document> = synthetic_docs(32)
        .into_iter()
        .enumerate()
        .map(|(i, bytes)| Document::new(format!("doc{i}"), bytes))
        .collect();
    let mut ledger = Ledger::new();
    let receipt = issue_batch(&issuer, &docs, &mut ledger, &clock).unwrap();
    let entries: Vec<(Vec<u8>, Stamp)> = docs
        .iter()
        .zip(&receipt.stamps)
        .map(|(d, (_, s))| (d.bytes.clone(), s.clone()))
        .collect();

    let mut group = c.benchmark_group("portfolio_verify");
    group.throughput(Throughput::Elements(entries.len() as u64));
    group.bench_function("shared_anchor", |b| {
        b.iter(|| black_box(verify_portfolio(&entries, &ledger, &ring).overall))
    });
    group.bench_function("one_by_one", |b| {
        b.iter(|| {
            entries
                .iter()
                .all(|(bytes, stamp)| verify_document(bytes, stamp, &ledger, &ring).is_accept())
        })
    });
    group.finish();
}

criterion_group!(benches, bench_leaf_hashing, bench_tree_build, bench_portfolio_verify);
criterion_main!(benches);
