//! Named tournaments used throughout the classification: transitive T_k,
//! the small cycles, the exceptional 5-vertex pair F_5 and H_5, the fourteen
//! hard 6-vertex tournaments and the copy-maximizing hosts S_7, S_11, S_15.

use thiserror::Error;

use crate::tournament::Tournament;

pub const C3_CODE: &str = "10,1";
/// Unique 4-vertex tournament containing a 4-cycle.
pub const C4_CODE: &str = "110,11,1";
/// The strongly connected, rigid, twin-free 5-vertex tournament that is not
/// H_5: a transitive order with its spanning path reversed.
pub const F5_CODE: &str = "1000,100,10,1";
pub const H5_CODE: &str = "0010,001,00,0";
pub const S7_CODE: &str = "001011,00101,0010,001,00,0";
pub const S11_CODE: &str = "1100110001,101001011,11010101,0001101,100011,00110,1000,100,10,0";
pub const S15_CODE: &str = "01010100100110,0011110000001,010001001101,10011000010,1011101010,\
110110010,11101001,1110001,010110,11110,0101,001,10,0";

/// Upper-triangle codes of H_6^1 .. H_6^14, indexed by superscript minus one.
pub const H6_CODES: [&str; 14] = [
    "00010,0000,001,00,0",
    "00110,0001,000,01,0",
    "00101,0010,000,00,0",
    "00100,0010,001,00,0",
    "00100,0010,000,01,0",
    "00100,0010,000,00,1",
    "00100,0011,001,00,0",
    "00100,0011,000,01,0",
    "00111,0010,000,00,0",
    "00111,0010,001,00,0",
    "00010,0101,000,00,0",
    "01010,0001,000,00,0",
    "01010,0000,001,00,0",
    "01010,0000,000,01,0",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog name {0:?}")]
    UnknownName(String),
}

/// Looks up a named tournament: `T_k` (k = 1..16), `C_3`, `C_4`, `F_5`,
/// `H_5`, `H_6^1` .. `H_6^14`, `S_7`, `S_11`, `S_15`.
pub fn catalog(name: &str) -> Result<Tournament, CatalogError> {
    let name = name.trim();
    let fixed = match name {
        "C_3" => Some(C3_CODE),
        "C_4" => Some(C4_CODE),
        "F_5" => Some(F5_CODE),
        "H_5" => Some(H5_CODE),
        "S_7" => Some(S7_CODE),
        "S_11" => Some(S11_CODE),
        "S_15" => Some(S15_CODE),
        _ => None,
    };
    if let Some(code) = fixed {
        return Ok(Tournament::parse_code(code).expect("catalog codes are well-formed"));
    }
    if let Some(k) = name.strip_prefix("T_").and_then(|s| s.parse::<usize>().ok()) {
        if (1..=16).contains(&k) {
            return Ok(Tournament::transitive(k));
        }
    }
    if let Some(i) = name
        .strip_prefix("H_6^")
        .and_then(|s| s.parse::<usize>().ok())
    {
        if (1..=14).contains(&i) {
            return Ok(Tournament::parse_code(H6_CODES[i - 1]).expect("catalog codes are well-formed"));
        }
    }
    Err(CatalogError::UnknownName(name.to_string()))
}

/// Convenience accessor for H_6^i.
pub fn h6(i: usize) -> Tournament {
    assert!((1..=14).contains(&i));
    Tournament::parse_code(H6_CODES[i - 1]).expect("catalog codes are well-formed")
}

/// Display order for the catalog listing.
pub fn catalog_names() -> Vec<String> {
    let mut names: Vec<String> = (2..=8).map(|k| format!("T_{k}")).collect();
    names.extend(["C_3", "C_4", "F_5", "H_5"].map(String::from));
    names.extend((1..=14).map(|i| format!("H_6^{i}")));
    names.extend(["S_7", "S_11", "S_15"].map(String::from));
    names
}
