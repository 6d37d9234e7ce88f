use criterion::{criterion_group, criterion_main, Criterion};
use lcvmark::image::CoeffGrid;
use lcvmark::transforms::pyramid::{lp_decompose, lp_reconstruct};
use lcvmark::transforms::{ct_decompose_grid, ct_reconstruct, dfb_decompose, dfb_reconstruct, Dct2d};
use std::hint::black_box;

fn input(side: usize) -> CoeffGrid {
    CoeffGrid::from_fn(side, side, |r, c| ((r * 131 + c * 71) % 251) as f64 + (r as f64 * 0.05).sin() * 40.0)
}

fn pyramid(c: &mut Criterion) {
    let x = input(512);
    let (approx, band) = lp_decompose(&x).unwrap();
    c.bench_function("lp_decompose_512", |b| b.iter(|| lp_decompose(black_box(&x)).unwrap()));
    c.bench_function("lp_reconstruct_512", |b| {
        b.iter(|| lp_reconstruct(black_box(&approx), black_box(&band)).unwrap())
    });
}

fn directional(c: &mut Criterion) {
    let x = input(512);
    let bands = dfb_decompose(&x).unwrap();
    c.bench_function("dfb_decompose_512", |b| b.iter(|| dfb_decompose(black_box(&x)).unwrap()));
    c.bench_function("dfb_reconstruct_512", |b| b.iter(|| dfb_reconstruct(black_box(&bands)).unwrap()));
}

fn contourlet(c: &mut Criterion) {
    let x = input(512);
    let set = ct_decompose_grid(&x).unwrap();
    c.bench_function("ct_decompose_512", |b| b.iter(|| ct_decompose_grid(black_box(&x)).unwrap()));
    c.bench_function("ct_reconstruct_512", |b| b.iter(|| ct_reconstruct(black_box(&set)).unwrap()));
}

fn block_dct(c: &mut Criterion) {
    let mut group = c.benchmark_group("dct2");
    for side in [4usize, 16] {
        let dct = Dct2d::new(side);
        let block = input(side);
        group.bench_function(format!("{side}x{side}"), |b| b.iter(|| dct.forward(black_box(&block)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, pyramid, directional, contourlet, block_dct);
criterion_main!(benches);
