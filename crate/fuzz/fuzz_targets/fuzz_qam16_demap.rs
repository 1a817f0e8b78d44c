#![no_main]

use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;

use dbfsim::tx::{qam16_demap, qam16_map, BitStream};

fuzz_target!(|data: &[u8]| {
    let samples: Vec<Complex64> = data
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let bits = qam16_demap(&samples);
    assert_eq!(bits.len(), 4 * samples.len());
    assert!(bits.iter().all(|&b| b <= 1));
    // demapping an ideal constellation is exact
    if let Ok(stream) = BitStream::new(bits.clone()) {
        assert_eq!(qam16_demap(&qam16_map(&stream)), bits);
    }
});
