//! Radius multipliers. All neighborhoods at logradius `r` have radius `c * 5^r`.

/// Separation and covering radius of the nets `J_r`.
pub const C1: u32 = 20;
/// Ball radius that defines areas.
pub const C2: u32 = 35;
/// Neighborhood radius for `X(j, r)`.
pub const CX: u32 = 2 * C2 + 2;
pub const C3: u32 = CX + C2;
/// Neighborhood radius for `Y(j, r)`.
pub const CY: u32 = 2 * C3 + C2;
/// Coloring conflict radius.
pub const C4: u32 = CY + C2;

/// `c2 + c3 + c4 + 1`: payment multiplier bounding the realized cost.
pub const PAYMENT_FACTOR: u32 = C2 + C3 + C4 + 1;
/// `5 * (c2 + c3 + c4 + 1)`: approximation factor against the optimum.
pub const APPROX_FACTOR: u32 = 5 * PAYMENT_FACTOR;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_values() {
        assert_eq!((C1, C2, CX, C3, CY, C4), (20, 35, 72, 107, 249, 284));
        assert_eq!(PAYMENT_FACTOR, 427);
        assert_eq!(APPROX_FACTOR, 2135);
        // find_balls needs cstar >= 5/4 * c1 for every radius it is used with.
        for c in [C2, CX, CY, C4] {
            assert!(4 * c >= 5 * C1);
        }
    }
}
