//! Checks the consensus gain matrix `L + B` for a few communication graphs.

use auv_formation::graph::Topology;

fn report(label: &str, n: usize, edges: &[(usize, usize, f64)], access: &[f64]) {
    let topo = Topology::from_edges(n, edges, access).expect("valid topology");
    let gain = topo.consensus_gain_matrix();
    println!(
        "{label:<28} connected={:<5} min eig {:>9.4}  positive definite: {}",
        topo.is_connected(),
        gain.min_eigenvalue,
        gain.positive_definite
    );
}

fn main() {
    let chain = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)];
    report("chain, vessel 1 leads", 4, &chain, &[1.0, 0.0, 0.0, 0.0]);
    report("chain, vessel 4 leads", 4, &chain, &[0.0, 0.0, 0.0, 1.0]);
    report("chain, nobody sees ref", 4, &chain, &[0.0; 4]);
    report("split in two", 4, &[(0, 1, 1.0), (2, 3, 1.0)], &[1.0, 0.0, 0.0, 0.0]);
    report("ring, weak access", 4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)], &[0.1, 0.0, 0.0, 0.0]);

    let topo = Topology::from_edges(4, &chain, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    println!("\nchain Laplacian:{}", topo.laplacian());
}
