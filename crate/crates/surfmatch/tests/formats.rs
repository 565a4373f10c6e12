//! Round trips of the text formats over generated inputs.

use proptest::prelude::*;
use surfmatch::formats::{detection_lines, export_lattice, parse_fault_records, parse_lattice, write_fault_records, FaultRecord};
use surfmatch_core::lattice::build_lattice;
use surfmatch_core::noise::sample_faults;
use surfmatch_core::syndrome::simulate;
use surfmatch_core::{Layout, MemoryBasis, MemoryCircuit, StabilizerKind};

#[test]
fn lattice_exports_round_trip() {
    for d in [2, 3, 4] {
        for basis in [MemoryBasis::Z, MemoryBasis::X] {
            let c = MemoryCircuit::for_distance(d, 3, basis).unwrap();
            for kind in [StabilizerKind::Z, StabilizerKind::X] {
                let l = build_lattice(&c, kind).unwrap();
                let text = export_lattice(&l);
                assert_eq!(text, export_lattice(&build_lattice(&c, kind).unwrap()));
                assert_eq!(parse_lattice("t", &text).unwrap(), l);
            }
        }
    }
}

#[test]
fn detection_dump_lines() {
    let c = MemoryCircuit::for_distance(3, 2, MemoryBasis::Z).unwrap();
    let faults = sample_faults(&c, 0.05, 3, 1).unwrap();
    let (events, _) = simulate(&c, &faults);
    let text = detection_lines(c.layout(), &events);
    assert_eq!(text.lines().count(), events.len());
    for line in text.lines() {
        let t: Vec<&str> = line.split(' ').collect();
        assert_eq!(t.len(), 4);
        assert!(t[3] == "Z" || t[3] == "X");
        let x: i32 = t[1].parse().unwrap();
        let y: i32 = t[2].parse().unwrap();
        assert!((0..5).contains(&x) && (0..5).contains(&y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fault_records_round_trip(seed in any::<u64>(), shot in 0u64..1_000_000, d in 2u32..5, x in any::<bool>(), p in 0.0f64..0.05) {
        let basis = if x { MemoryBasis::X } else { MemoryBasis::Z };
        let c = MemoryCircuit::for_distance(d, 2, basis).unwrap();
        let faults = sample_faults(&c, p, seed, shot).unwrap();
        let (events, failed) = simulate(&c, &faults);
        let rec = FaultRecord {
            distance: d,
            rounds: 2,
            basis,
            p,
            seed,
            shot,
            failed,
            faults: faults.as_slice().to_vec(),
            events: events.events().to_vec(),
        };
        let text = write_fault_records(std::slice::from_ref(&rec), |r| Layout::new(r.distance).ok());
        let back = parse_fault_records("t", &text).unwrap();
        prop_assert_eq!(back, vec![rec]);
    }
}
