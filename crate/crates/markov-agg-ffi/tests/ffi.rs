//! Exercises the C ABI through the exported symbols, including error codes
//! and the last-error message.

use std::ffi::CStr;
use std::ptr;

use markov_agg_ffi::*;

const P3: [f64; 9] = [0.97, 0.01, 0.02, 0.02, 0.48, 0.50, 0.01, 0.75, 0.24];

unsafe fn make_chain(entries: &[f64], n: usize) -> *mut MagChain {
    let mut chain = ptr::null_mut();
    assert_eq!(mag_chain_new(entries.as_ptr(), n, &mut chain), MagStatus::Ok);
    chain
}

unsafe fn make_partition(labels: &[usize]) -> *mut MagPartition {
    let mut partition = ptr::null_mut();
    assert_eq!(
        mag_partition_new(labels.as_ptr(), labels.len(), &mut partition),
        MagStatus::Ok
    );
    partition
}

#[test]
fn chain_roundtrip_and_stationary() {
    unsafe {
        let chain = make_chain(&P3, 3);
        assert_eq!(mag_chain_dim(chain), 3);
        let mut mu = [0.0; 3];
        assert_eq!(mag_chain_stationary(chain, mu.as_mut_ptr()), MagStatus::Ok);
        assert!((mu[0] - 0.347).abs() <= 1e-3);
        assert!((mu[1] - 0.388).abs() <= 1e-3);
        assert!((mu[2] - 0.265).abs() <= 1e-3);
        mag_chain_free(chain);
    }
}

#[test]
fn invalid_matrix_reports_input_error_with_message() {
    unsafe {
        let bad = [0.5, 0.6, 0.3, 0.7];
        let mut chain = ptr::null_mut();
        assert_eq!(mag_chain_new(bad.as_ptr(), 2, &mut chain), MagStatus::InvalidInput);
        let message = mag_last_error_message();
        assert!(!message.is_null());
        let text = CStr::from_ptr(message).to_string_lossy();
        assert!(text.contains("row"), "{text}");
    }
}

#[test]
fn periodic_chain_reports_computation_error() {
    unsafe {
        let swap = [0.0, 1.0, 1.0, 0.0];
        let mut chain = ptr::null_mut();
        assert_eq!(mag_chain_new(swap.as_ptr(), 2, &mut chain), MagStatus::ComputationError);
    }
}

#[test]
fn partition_canonicalizes_labels() {
    unsafe {
        let partition = make_partition(&[2, 2, 1]);
        assert_eq!(mag_partition_num_classes(partition), 2);
        let mut labels = [0usize; 3];
        assert_eq!(mag_partition_labels(partition, labels.as_mut_ptr()), MagStatus::Ok);
        assert_eq!(labels, [1, 1, 2]);
        mag_partition_free(partition);
    }
}

#[test]
fn evaluate_matches_library_values() {
    unsafe {
        let chain = make_chain(&P3, 3);
        let partition = make_partition(&[1, 2, 2]);
        let mut metrics = MagMetrics {
            kldr_p: 0.0,
            kldr_mu: 0.0,
            loss_x: 0.0,
            loss_y: 0.0,
            h_rate: 0.0,
            lumpable: 9,
        };
        assert_eq!(mag_evaluate(chain, partition, 1e-10, &mut metrics), MagStatus::Ok);
        assert!((metrics.kldr_p - 0.001).abs() <= 1e-3);
        assert!((metrics.kldr_mu - 0.037).abs() <= 1e-3);
        assert!(metrics.kldr_p <= metrics.kldr_mu);
        assert_eq!(metrics.lumpable, 0);
        mag_partition_free(partition);
        mag_chain_free(chain);
    }
}

#[test]
fn size_mismatch_is_invalid_input() {
    unsafe {
        let chain = make_chain(&P3, 3);
        let partition = make_partition(&[1, 2]);
        let mut metrics = MagMetrics {
            kldr_p: 0.0,
            kldr_mu: 0.0,
            loss_x: 0.0,
            loss_y: 0.0,
            h_rate: 0.0,
            lumpable: 0,
        };
        assert_eq!(
            mag_evaluate(chain, partition, 1e-10, &mut metrics),
            MagStatus::InvalidInput
        );
        mag_partition_free(partition);
        mag_chain_free(chain);
    }
}

#[test]
fn lift_rows_are_stochastic() {
    unsafe {
        let chain = make_chain(&P3, 3);
        let partition = make_partition(&[1, 2, 2]);
        for use_p_lift in [0u8, 1] {
            let mut lifted = [0.0; 9];
            assert_eq!(
                mag_lift(chain, partition, use_p_lift, lifted.as_mut_ptr()),
                MagStatus::Ok
            );
            for row in lifted.chunks(3) {
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
        mag_partition_free(partition);
        mag_chain_free(chain);
    }
}

#[test]
fn lumpability_check_via_ffi() {
    unsafe {
        let lumpable_matrix = [0.0475, 0.9025, 0.05, 0.9025, 0.0475, 0.05, 0.95, 0.05, 0.0];
        let chain = make_chain(&lumpable_matrix, 3);
        let partition = make_partition(&[1, 1, 2]);
        let mut lumpable = 0u8;
        let mut violation = -1.0;
        assert_eq!(
            mag_lumpability_check(chain, partition, 1e-10, &mut lumpable, &mut violation),
            MagStatus::Ok
        );
        assert_eq!(lumpable, 1);
        assert_eq!(violation, 0.0);
        mag_partition_free(partition);
        mag_chain_free(chain);
    }
}

#[test]
fn searches_agree_with_known_example() {
    unsafe {
        let matrix = [0.0475, 0.9025, 0.05, 0.9025, 0.0475, 0.05, 0.95, 0.05, 0.0];
        let chain = make_chain(&matrix, 3);
        let mut greedy = ptr::null_mut();
        assert_eq!(
            mag_search_greedy(chain, 2, ptr::null(), 0, &mut greedy),
            MagStatus::Ok
        );
        let mut labels = [0usize; 3];
        mag_partition_labels(greedy, labels.as_mut_ptr());
        assert_eq!(labels, [1, 2, 2]);
        let mut best = ptr::null_mut();
        let mut value = -1.0;
        assert_eq!(
            mag_search_exhaustive(chain, 2, 0, &mut best, &mut value),
            MagStatus::Ok
        );
        mag_partition_labels(best, labels.as_mut_ptr());
        assert_eq!(labels, [1, 1, 2]);
        assert!(value <= 1e-10);
        mag_partition_free(greedy);
        mag_partition_free(best);
        mag_chain_free(chain);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        let mut mu = [0.0; 3];
        assert_eq!(mag_chain_stationary(ptr::null(), mu.as_mut_ptr()), MagStatus::InvalidInput);
        assert_eq!(mag_chain_dim(ptr::null()), 0);
        assert_eq!(mag_partition_num_classes(ptr::null()), 0);
        mag_chain_free(ptr::null_mut());
        mag_partition_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/markov_agg.h"),
    )
    .expect("header generated at build time");
    for symbol in [
        "mag_chain_new",
        "mag_chain_free",
        "mag_chain_stationary",
        "mag_partition_new",
        "mag_evaluate",
        "mag_lift",
        "mag_lumpability_check",
        "mag_search_greedy",
        "mag_search_exhaustive",
        "mag_last_error_message",
        "MagStatus",
        "MagMetrics",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}
