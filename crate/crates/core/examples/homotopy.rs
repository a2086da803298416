//! Homotopy groups of U(m) and of its classifying space, unstable and stable.

use chiraltop::classify::{pi_classifying, pi_unitary, Rank};

fn main() {
    for m in (1..=4).map(Rank::Finite).chain([Rank::Infinite]) {
        let row: Vec<String> = (1..=10)
            .map(|k| pi_unitary(m, k).map_or_else(|e| e.to_string(), |g| g.to_string()))
            .collect();
        println!("π_k(U({m})), k = 1..10:\n  {}", row.join(" | "));
    }
    // π_k(BU(m)) = π_{k−1}(U(m))
    println!("π4(BU(2)) = {}", pi_classifying(Rank::Finite(2), 4).unwrap());
    println!("π5(BU(2)) = {}", pi_classifying(Rank::Finite(2), 5).unwrap());
}
