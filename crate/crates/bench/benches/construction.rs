use criterion::{black_box, criterion_group, criterion_main, Criterion};

use kakutani_core::block_reorder::Direction;
use kakutani_core::convergence::{sample_windows, Probe};
use kakutani_core::good_sets::{good_positions, ParityMode};
use kakutani_core::stage_builder::stage4::{sample_targets, LazyPhi4, Stage4};
use kakutani_core::templates::Basic;
use kakutani_core::words::{morse_prefix, parse_partition};
use kakutani_core::System;

fn stage() -> Stage4 {
    let good = good_positions(2, 6, 14, ParityMode::Explicit { parity: 0, offset: 6 }, false, Direction::MorseTarget, &[])
        .unwrap();
    Stage4::new(6, 14, good).unwrap()
}

fn words(c: &mut Criterion) {
    c.bench_function("morse_prefix(20)", |b| b.iter(|| morse_prefix(black_box(20))));
    let u = morse_prefix(16);
    let w = u.slice(12345, 3 << 8);
    c.bench_function("parse_partition k=8", |b| b.iter(|| parse_partition(black_box(&w), 8)));
}

fn stage4(c: &mut Criterion) {
    let st = stage();
    let t = sample_targets(14, 3, 1, false)[2];
    c.bench_function("stage-4 explicit build (2,6,14)", |b| b.iter(|| st.build(black_box(&t), (0, 0)).unwrap()));
    let lz = LazyPhi4::new(&st, t, (0, 0)).unwrap();
    c.bench_function("stage-4 lazy image x1000", |b| {
        b.iter(|| (0..1000i128).map(|x| lz.image(black_box(x * 16)).unwrap_or(0)).sum::<i128>())
    });
    c.bench_function("good set auto (2,6,14), 8 targets", |b| {
        let ts = sample_targets(14, 8, 1, false);
        b.iter(|| good_positions(2, 6, 14, ParityMode::Auto, false, Direction::MorseTarget, black_box(&ts)).unwrap())
    });
    let zero = Basic::zero(System::Morse, 14, false);
    c.bench_function("stage-4 zero template build", |b| b.iter(|| st.build(black_box(&zero), (0, 0)).unwrap()));
}

fn probes(c: &mut Criterion) {
    let pr = Probe::desk(6, 14, 16, 1).unwrap();
    let ws = sample_windows(&morse_prefix(20), 1 << 16, 4, 1).unwrap();
    c.bench_function("check_inverse on 2^16 windows x4", |b| {
        b.iter(|| ws.iter().map(|w| pr.check_inverse(black_box(w), &[2, 4]).is_ok() as u32).sum::<u32>())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = words, stage4, probes
}
criterion_main!(benches);
