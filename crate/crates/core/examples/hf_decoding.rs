//! Set-valued predictions maximizing expected hierarchical F-beta. Larger
//! beta favors recall and returns larger sets.

use hierdecode::decode_hfbeta::{q_set, utility_lower_bound, HfBetaContext};
use hierdecode::{Hierarchy, LeafDistribution};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv("r\tA\nA\ta1\nA\ta2\nr\tb\n")?;
    let rows = [vec![0.4, 0.3, 0.3], vec![0.6, 0.3, 0.1], vec![0.2, 0.2, 0.6], vec![0.34, 0.33, 0.33]];
    for beta in [0.5, 1.0, 2.0] {
        let ctx = HfBetaContext::new(&h, beta)?;
        println!(
            "beta = {beta}: at most {} nodes per prediction, optimum >= {:.3}",
            ctx.n_max(),
            utility_lower_bound(&h, beta)
        );
        for row in &rows {
            let p = LeafDistribution::new(row.clone())?;
            let r = ctx.decode_detailed(&h, &p)?;
            let q: Vec<&str> = q_set(&h, &h.aggregate(&p)?, beta).iter().map(|&n| h.name(n)).collect();
            println!(
                "  p = {:?} -> {{{}}}  E[hF] = {:.4}  |Q(p)| = {} {:?}",
                row,
                r.prediction.display(&h),
                r.utility,
                q.len(),
                q
            );
        }
    }
    Ok(())
}
