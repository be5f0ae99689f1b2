use criterion::{criterion_group, criterion_main, Criterion};
use pinfloer::{gysin_sequence, model, Flavor, ModelName};
use pinfloer_bench::fixture;
use std::hint::black_box;

fn assembly(c: &mut Criterion) {
    let (_, w) = fixture(ModelName::T3, 12);
    c.bench_function("model/t3", |b| b.iter(|| model(ModelName::T3, black_box(w)).unwrap()));
}

fn homology(c: &mut Criterion) {
    for name in [ModelName::S3, ModelName::T3] {
        let (data, w) = fixture(name, 12);
        let asm = data.assemble().unwrap();
        c.bench_function(&format!("homology/{}/bar", name.name()), |b| {
            b.iter(|| asm.complex(Flavor::Bar, w).unwrap().homology().unwrap())
        });
    }
}

fn validate(c: &mut Criterion) {
    for name in [ModelName::S3, ModelName::T3] {
        let (data, w) = fixture(name, 8);
        c.bench_function(&format!("validate/{}", name.name()), |b| b.iter(|| data.validate(w)));
    }
}

fn gysin(c: &mut Criterion) {
    let (data, w) = fixture(ModelName::S1xS2, 12);
    c.bench_function("gysin/s1xs2/check", |b| b.iter(|| gysin_sequence(&data, Flavor::Check, w).unwrap()));
}

criterion_group!(benches, assembly, homology, validate, gysin);
criterion_main!(benches);
