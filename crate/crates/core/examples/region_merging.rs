//! The three merging stages on a hand-built region table, with the merge
//! log printed after each stage.
//!
//! ```bash
//! cargo run -p ser-segment --example region_merging
//! ```

use ser_segment::merging::{
    final_region_count, merge_by_importance, merge_mutual_most_similar, merge_small_regions, MergeParams,
    RegionInput, RegionTable,
};
use ser_segment::Lab;

/// A region of `sers` elemental regions whose 16-pixel blocks alternate
/// between two shades of L*.
fn region(sers: usize, l: f64, spread: f64) -> RegionInput {
    let pixels = (0..sers * 16)
        .map(|i| Lab::new(if i % 2 == 0 { l } else { l + spread }, 0.0, 0.0))
        .collect();
    RegionInput { ser_count: sers, pixels }
}

fn show(table: &RegionTable, from: usize) {
    for e in &table.log()[from..] {
        println!("  {:?}: {} absorbs {} (score {:.4})", e.stage, e.kept, e.absorbed, e.score);
    }
    let live: Vec<String> = table
        .live_ids()
        .map(|id| format!("{id}[{} SERs, L*={:.1}]", table.size(id), table.mean(id).l))
        .collect();
    println!("  live: {}", live.join(", "));
}

fn main() {
    // a row of regions: two near-identical large ones, a sliver, a textured
    // patch, and two distinct large ones
    let parts = vec![
        region(40, 20.0, 1.0),
        region(35, 21.0, 1.0),
        region(3, 50.0, 0.0),
        region(20, 45.0, 12.0),
        region(30, 70.0, 1.0),
        region(25, 90.0, 1.0),
    ];
    let adjacency = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 3)];
    let ranges = [(0.0, 100.0), (-1.0, 1.0), (-1.0, 1.0)];
    let mut table = RegionTable::from_parts(&parts, &adjacency, ranges, 20, 0.8);
    let params = MergeParams::default();

    println!("small-region absorption:");
    merge_small_regions(&mut table, params.min_region_sers);
    show(&table, 0);

    let mark = table.log().len();
    let desired = 3;
    let outcome = merge_by_importance(&mut table, desired, &params);
    println!("merge-importance stage (desired {desired}): {outcome:?}");
    show(&table, mark);

    let mark = table.log().len();
    let n2 = table.live_count();
    println!(
        "mutual-similarity stage: target {} of {n2}",
        final_region_count(n2, params.zeta)
    );
    let outcome = merge_mutual_most_similar(&mut table, params.zeta, params.xi);
    println!("  {outcome:?}");
    show(&table, mark);
    table.check_invariants();
}
