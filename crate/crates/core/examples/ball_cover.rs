//! Greedy ball cover of a point cloud, its incidence graph, and a spanning
//! tree with a leaf-removal order.

use poincare_lab::pullback::{ball_cover, incidence_graph, spanning_tree, Metric, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> poincare_lab::Result<()> {
    let circle = PointCloud::new(
        1,
        vec![0.0, 0.25, 0.5, 0.75],
        Metric::Torus { lengths: vec![1.0] },
    )?;
    let cover = ball_cover(&circle, 0.3)?;
    let tree = spanning_tree(&incidence_graph(&cover))?;
    println!(
        "circle: centers {:?}, tree edges {:?}, leaf order {:?}",
        cover.centers, tree.edges, tree.leaf_order
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let coords = (0..1000).map(|_| rng.random::<f64>()).collect();
    let cloud = PointCloud::new(
        2,
        coords,
        Metric::Torus {
            lengths: vec![1.0, 1.0],
        },
    )?;
    for radius in [0.3, 0.2, 0.1] {
        let cover = ball_cover(&cloud, radius)?;
        cover.validate()?;
        let graph = incidence_graph(&cover);
        let tree = spanning_tree(&graph)?;
        println!(
            "torus, 500 points, radius {radius}: K = {}, {} incidence edges, tree ok: {}, leaf order ok: {}",
            tree.k,
            graph.edges.len(),
            tree.is_tree(),
            tree.leaf_order_is_valid()
        );
    }
    Ok(())
}
