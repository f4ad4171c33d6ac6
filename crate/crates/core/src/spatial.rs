//! Network geometry: uniform-clustering placement with exclusion zones and
//! the order-of-placement guard-zone deactivation scan.
//!
//! Placement draws each interfering mobile uniformly over the network disk
//! and redraws it until it lands at least `r_ex` away from every mobile
//! placed before it (the receiver and the reference transmitter included),
//! keeping the mobile count fixed. Deactivation walks the mobiles in
//! placement order and silences any that fall strictly inside the guard
//! zone of an earlier, still-active mobile. Boundary conventions are chosen
//! so the two stages compose cleanly: placement accepts separation `>= r_ex`
//! and deactivation fires on separation `< r_g`, hence `r_g == r_ex` leaves
//! every mobile active.

use crate::error::{Error, Result};
use rand::Rng;
use std::f64::consts::TAU;

/// Redraw budget per mobile before placement is declared infeasible. The
/// densest configurations of interest succeed with orders of magnitude
/// fewer redraws.
pub const PLACEMENT_RETRY_CAP: u32 = 10_000;

/// A mobile location in the network plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Distance from the network center.
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Disk network layout. All lengths share one unit; the network disk is
/// centered on the origin.
#[derive(Debug, Clone, Copy)]
pub struct NetworkGeometry {
    /// Network radius.
    pub r_net: f64,
    /// Exclusion-zone radius enforced at placement time.
    pub r_ex: f64,
    /// Guard-zone radius applied by [`apply_guard_zones`]; must contain the
    /// exclusion zone.
    pub r_g: f64,
    /// Reference receiver location.
    pub receiver: Point,
    /// Separation between the receiver and the reference transmitter.
    pub tx_distance: f64,
    /// Number of potentially interfering mobiles.
    pub num_interferers: usize,
}

impl NetworkGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_net > 0.0) || !self.r_net.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "network radius must be positive and finite (got {})",
                self.r_net
            )));
        }
        if !(self.r_ex >= 0.0) || !self.r_ex.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exclusion-zone radius must be nonnegative (got {})",
                self.r_ex
            )));
        }
        if !(self.r_g >= self.r_ex) {
            return Err(Error::InvalidParameter(format!(
                "guard-zone radius {} must not be smaller than the exclusion-zone radius {}",
                self.r_g, self.r_ex
            )));
        }
        if !(self.tx_distance > 0.0) || !self.tx_distance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transmitter distance must be positive (got {})",
                self.tx_distance
            )));
        }
        if self.tx_distance < self.r_ex {
            return Err(Error::InvalidParameter(format!(
                "transmitter distance {} must be at least the exclusion-zone radius {}",
                self.tx_distance, self.r_ex
            )));
        }
        if !self.receiver.x.is_finite() || !self.receiver.y.is_finite() {
            return Err(Error::InvalidParameter("receiver coordinates must be finite".into()));
        }
        let d = self.receiver.norm();
        if d > self.r_net * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "receiver lies outside the network disk (|receiver| = {}, r_net = {})",
                d, self.r_net
            )));
        }
        if self.tx_distance > d + self.r_net {
            return Err(Error::InvalidParameter(format!(
                "transmitter distance {} cannot keep the transmitter inside the network disk",
                self.tx_distance
            )));
        }
        Ok(())
    }
}

/// One placed network: receiver, reference transmitter, interferer locations
/// in placement order, and a per-interferer activity flag.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub geometry: NetworkGeometry,
    /// Reference transmitter location.
    pub x0: Point,
    /// Interferer locations, ordered by placement (the order drives
    /// guard-zone deactivation).
    pub interferers: Vec<Point>,
    /// Activity flag per interferer, aligned with `interferers`.
    pub active: Vec<bool>,
}

impl NetworkRealization {
    /// Number of active interferers (the reference transmitter not counted).
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

/// Draw a network realization under the uniform-clustering model.
///
/// The reference transmitter is placed first at `tx_distance` from the
/// receiver: aimed at the network center when the receiver sits on the
/// perimeter, in a uniformly random direction otherwise. Interferers are
/// then drawn one by one, each redrawn until it clears every exclusion zone
/// already on the map (receiver and transmitter included). All activity
/// flags start true.
pub fn place_network<R: Rng + ?Sized>(
    geometry: &NetworkGeometry,
    rng: &mut R,
) -> Result<NetworkRealization> {
    geometry.validate()?;
    let x0 = place_reference_tx(geometry, rng)?;

    let mut interferers: Vec<Point> = Vec::with_capacity(geometry.num_interferers);
    for index in 0..geometry.num_interferers {
        let mut placed = None;
        for _ in 0..PLACEMENT_RETRY_CAP {
            let cand = uniform_in_disk(geometry.r_net, rng);
            if cand.distance(&geometry.receiver) < geometry.r_ex {
                continue;
            }
            if cand.distance(&x0) < geometry.r_ex {
                continue;
            }
            if interferers.iter().any(|p| cand.distance(p) < geometry.r_ex) {
                continue;
            }
            placed = Some(cand);
            break;
        }
        match placed {
            Some(p) => interferers.push(p),
            // index 0 names the reference transmitter, interferer i is i+1
            None => {
                return Err(Error::PlacementInfeasible {
                    index: index + 1,
                    retries: PLACEMENT_RETRY_CAP,
                })
            }
        }
    }

    let active = vec![true; geometry.num_interferers];
    Ok(NetworkRealization { geometry: *geometry, x0, interferers, active })
}

fn place_reference_tx<R: Rng + ?Sized>(g: &NetworkGeometry, rng: &mut R) -> Result<Point> {
    let d = g.receiver.norm();
    if d >= g.r_net * (1.0 - 1e-12) {
        // Receiver on the perimeter: aim at the network center.
        let scale = 1.0 - g.tx_distance / d;
        return Ok(Point::new(g.receiver.x * scale, g.receiver.y * scale));
    }
    for _ in 0..PLACEMENT_RETRY_CAP {
        let theta = TAU * rng.gen::<f64>();
        let cand = Point::new(
            g.receiver.x + g.tx_distance * theta.cos(),
            g.receiver.y + g.tx_distance * theta.sin(),
        );
        if cand.norm() <= g.r_net {
            return Ok(cand);
        }
    }
    Err(Error::PlacementInfeasible { index: 0, retries: PLACEMENT_RETRY_CAP })
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = TAU * rng.gen::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Deactivate interferers caught inside the guard zone of an earlier active
/// mobile.
///
/// The reference transmitter is activated first and the interferers are then
/// scanned in placement order; interferer `i` is silenced exactly when it
/// lies within `r_g` of the transmitter or of an active interferer placed
/// before it. Silenced mobiles suppress nobody, and the receiver carries no
/// guard zone. Flags are recomputed from the positions alone, so applying
/// the scan twice changes nothing.
pub fn apply_guard_zones(net: &NetworkRealization) -> NetworkRealization {
    let r_g = net.geometry.r_g;
    let mut out = net.clone();
    let mut active_mobiles: Vec<Point> = Vec::with_capacity(net.interferers.len() + 1);
    active_mobiles.push(net.x0);
    for (i, p) in net.interferers.iter().enumerate() {
        let suppressed = active_mobiles.iter().any(|a| p.distance(a) < r_g);
        out.active[i] = !suppressed;
        if !suppressed {
            active_mobiles.push(*p);
        }
    }
    out
}
