use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use num_complex::Complex64;
use tisp::lattice::FieldJson;
use tisp::{BandlimitedField, Error, GridSpec};

#[test]
fn binary_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    let grid = GridSpec::new(3, 5, 0.25).unwrap();
    let f = BandlimitedField::random(grid, 2, 99).unwrap();
    let mut w = BufWriter::new(File::create(&path).unwrap());
    f.write_binary(&mut w).unwrap();
    w.flush().unwrap();
    drop(w);
    let bytes = std::fs::metadata(&path).unwrap().len();
    assert_eq!(bytes, 5 + 4 + 4 + 8 + 16 * 125);
    let back = BandlimitedField::read_binary(BufReader::new(File::open(&path).unwrap())).unwrap();
    assert_eq!(back, f);
}

#[test]
fn json_round_trip_is_exact() {
    let grid = GridSpec::new(2, 7, 0.3).unwrap();
    let f = BandlimitedField::random(grid, 3, 4).unwrap();
    let text = serde_json::to_string(&f.to_json()).unwrap();
    let parsed: FieldJson = serde_json::from_str(&text).unwrap();
    assert_eq!(BandlimitedField::from_json(&parsed).unwrap(), f);
}

#[test]
fn truncated_and_corrupt_files_are_rejected() {
    let grid = GridSpec::new(1, 5, 1.0).unwrap();
    let f = BandlimitedField::mode(grid, &[1], Complex64::new(2.0, -1.0)).unwrap();
    let mut buf = Vec::new();
    f.write_binary(&mut buf).unwrap();
    assert!(BandlimitedField::read_binary(&buf[..buf.len() - 3]).is_err());
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(BandlimitedField::read_binary(&bad[..]).is_err());
    let mut nan = buf.clone();
    let at = nan.len() - 8;
    nan[at..].copy_from_slice(&f64::NAN.to_le_bytes());
    assert!(matches!(BandlimitedField::read_binary(&nan[..]), Err(Error::NonFinite(_))));
}
