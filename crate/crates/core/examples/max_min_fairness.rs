//! Max-min fair allocation of element capacities among flows.
//!
//!     cargo run -p tornet --example max_min_fairness

use tornet::sim::max_min_allocate;

fn main() {
    // Two relays of 10 and 4 units. Flow 0 crosses both, flow 1 only the first, flow 2 only the second.
    let caps = [10.0, 4.0];
    let flows = vec![vec![0, 1], vec![0], vec![1]];
    let rates = max_min_allocate(&caps, &flows);
    for (f, (elems, rate)) in flows.iter().zip(&rates).enumerate() {
        println!("flow {f} over {elems:?}: {rate}");
    }
    // The second relay splits 4 units two ways; flow 1 takes what flow 0 leaves on the first.
    assert_eq!(rates, [2.0, 8.0, 2.0]);
}
