use crate::error::Result;

use super::book::RestingOffer;

/// Allocation of one buyer's demand against one side of the book.
pub trait MatchingRule {
    /// `offers` are ascending by price; `target(price)` is the buyer's
    /// optimal cumulative quantity when cover costs `price`. Returns
    /// `(index into offers, MW bought)` pairs.
    fn allocate(&self, offers: &[RestingOffer], target: &mut dyn FnMut(f64) -> Result<f64>) -> Result<Vec<(usize, f64)>>;
}

/// Greedy price priority: walk price levels cheapest first and buy while the
/// marginal value of cover exceeds the level's price. A partially filled
/// level is shared pro-rata by remaining quantity.
#[derive(Debug, Clone, Copy, Default)]
pub struct PriceProrata;

impl MatchingRule for PriceProrata {
    fn allocate(&self, offers: &[RestingOffer], target: &mut dyn FnMut(f64) -> Result<f64>) -> Result<Vec<(usize, f64)>> {
        let mut fills = Vec::new();
        let mut bought = 0.0;
        let mut start = 0;
        while start < offers.len() {
            let price = offers[start].offer.price;
            let end = start + offers[start..].iter().take_while(|o| o.offer.price == price).count();
            let level: Vec<usize> = (start..end).filter(|&i| offers[i].remaining > 0.0).collect();
            start = end;
            let available: f64 = level.iter().map(|&i| offers[i].remaining).sum();
            if available <= 0.0 {
                continue;
            }
            let want = target(price)? - bought;
            if want <= 0.0 {
                break;
            }
            if want >= available {
                fills.extend(level.iter().map(|&i| (i, offers[i].remaining)));
                bought += available;
            } else {
                fills.extend(level.iter().map(|&i| (i, want * offers[i].remaining / available)));
                break;
            }
        }
        Ok(fills)
    }
}
