//! Dataset-scale checks: generated instances validate across wide seed
//! sweeps, the canonical 2048-seed validation set survives a bulk codec
//! round-trip, and a full-set batch rollout aggregates into one summary.

use rayon::prelude::*;

use vrpsim::codec::{decode_instance, encode_instance};
use vrpsim::generate::{generate_random, validation_seeds, GenerationSpec, InstanceSet, Split};
use vrpsim::policy::aggregate_stats;
use vrpsim::{batch_rollout, validate_instance, Problem, RolloutOptions};

#[test]
fn thousand_seed_sweep_validates() {
    let spec = GenerationSpec::for_problem(Problem::Cvrptw, 50);
    let bad: Vec<u64> = (0..1_000u64)
        .into_par_iter()
        .filter(|seed| {
            let inst = generate_random(&spec, *seed).unwrap();
            !validate_instance(&inst).ok()
        })
        .collect();
    assert!(bad.is_empty(), "validator rejected seeds {bad:?}");

    // Shorter sweeps across the remaining problems.
    for problem in Problem::ALL {
        let spec = GenerationSpec::for_problem(problem, 50);
        for seed in 0..150u64 {
            let inst = generate_random(&spec, seed).unwrap();
            let report = validate_instance(&inst);
            assert!(report.ok(), "{problem} seed {seed}: {report}");
        }
    }
}

#[test]
fn canonical_validation_set_bulk_round_trips_and_aggregates() {
    let spec = GenerationSpec::for_problem(Problem::Cvrptw, 50);
    let seeds = validation_seeds();
    assert_eq!(seeds.len(), 2_048);
    let set = InstanceSet {
        split: Split::Validation,
        seeds: seeds.clone(),
        spec: spec.clone(),
    };
    set.validate().unwrap();

    let instances: Vec<_> = seeds
        .par_iter()
        .map(|seed| {
            let inst = generate_random(&spec, *seed).unwrap();
            let decoded = decode_instance(encode_instance(&inst).unwrap().as_bytes()).unwrap();
            assert_eq!(inst, decoded, "seed {seed} failed the codec round-trip");
            decoded
        })
        .collect();

    let results = batch_rollout(&instances, &RolloutOptions::default()).unwrap();
    let stats: Vec<_> = results.into_iter().map(Result::unwrap).collect();
    let summary = aggregate_stats(&stats).unwrap();
    assert_eq!(summary.episodes, 2_048);
    assert!(summary.av_obj > 0.0);
    assert!(summary.av_agents_used > 0.0);
    assert!((0.0..=1.0).contains(&summary.av_served_fraction));
    println!(
        "validation set: av_obj {:.3}, av_agents {:.2}, av_served {:.3}",
        summary.av_obj, summary.av_agents_used, summary.av_served_fraction
    );
}
