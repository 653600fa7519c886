use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offer {
    pub seller: String,
    pub hour: u32,
    pub direction: Direction,
    /// $/MW
    pub price: f64,
    /// MW
    pub quantity: f64,
    pub zone: Option<String>,
}

impl Offer {
    pub fn validate(&self) -> Result<()> {
        if !(self.price >= 0.0 && self.price.is_finite()) {
            return Err(Error::domain(format!("offer price must be finite and >= 0, got {}", self.price)));
        }
        if !(self.quantity > 0.0 && self.quantity.is_finite()) {
            return Err(Error::domain(format!("offer quantity must be positive, got {}", self.quantity)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OfferId(pub u32);

/// An offer in the book with its unsold quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct RestingOffer {
    pub id: OfferId,
    pub offer: Offer,
    pub remaining: f64,
}

/// Per-direction offers, ascending by price, ties in arrival order.
#[derive(Debug, Clone, Default)]
pub struct OfferBook {
    down: Vec<RestingOffer>,
    up: Vec<RestingOffer>,
    next_id: u32,
}

impl OfferBook {
    pub fn insert(&mut self, offer: Offer) -> OfferId {
        let id = OfferId(self.next_id);
        self.next_id += 1;
        let side = self.side_mut(offer.direction);
        // after every offer at the same or a lower price
        let pos = side.partition_point(|o| o.offer.price <= offer.price);
        let remaining = offer.quantity;
        side.insert(pos, RestingOffer { id, offer, remaining });
        id
    }

    pub fn side(&self, direction: Direction) -> &[RestingOffer] {
        match direction {
            Direction::DownCoversOver => &self.down,
            Direction::UpCoversUnder => &self.up,
        }
    }

    pub(crate) fn side_mut(&mut self, direction: Direction) -> &mut Vec<RestingOffer> {
        match direction {
            Direction::DownCoversOver => &mut self.down,
            Direction::UpCoversUnder => &mut self.up,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offer(seller: &str, price: f64) -> Offer {
        Offer {
            seller: seller.into(),
            hour: 1,
            direction: Direction::UpCoversUnder,
            price,
            quantity: 5.0,
            zone: None,
        }
    }

    #[test]
    fn price_then_arrival_order() {
        let mut book = OfferBook::default();
        book.insert(offer("a", 3.0));
        book.insert(offer("b", 1.0));
        book.insert(offer("c", 3.0));
        book.insert(offer("d", 2.0));
        book.insert(offer("e", 1.0));
        let order: Vec<&str> = book.side(Direction::UpCoversUnder).iter().map(|o| o.offer.seller.as_str()).collect();
        assert_eq!(order, ["b", "e", "d", "a", "c"]);
        assert!(book.side(Direction::DownCoversOver).is_empty());
    }
}
