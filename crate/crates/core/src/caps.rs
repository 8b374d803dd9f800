//! Size caps for dense tensors and exact enumeration.
//!
//! `COORDLINE_CAP` overrides the enumeration cap (a plain integer, or `2^k`).

pub const DEFAULT_TENSOR_CAP: u128 = 1 << 24;
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 22;

pub fn tensor_cap() -> u128 {
    DEFAULT_TENSOR_CAP.max(enumeration_cap())
}

pub fn enumeration_cap() -> u128 {
    std::env::var("COORDLINE_CAP")
        .ok()
        .and_then(|v| parse_cap(&v))
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

pub fn parse_cap(v: &str) -> Option<u128> {
    let v = v.trim();
    if let Some(exp) = v.strip_prefix("2^") {
        let e: u32 = exp.parse().ok()?;
        return 1u128.checked_shl(e);
    }
    v.parse().ok()
}

/// Saturating product of sizes, for cap checks.
pub fn product(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes
        .into_iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}
