//! Purchase regions of two-item menus, as ASCII and as SVG files in the
//! system temporary directory.

use mechbench::buyer::region_partition_2;
use mechbench::model::Menu;

fn main() -> mechbench::Result<()> {
    for (name, prices) in [("supermodular", [15, 45, 80]), ("submodular", [27, 70, 85]), ("additive", [2, 3, 5])] {
        let partition = region_partition_2(&Menu::from_ints(2, &prices)?)?;
        let path = std::env::temp_dir().join(format!("regions_{name}.svg"));
        std::fs::write(&path, partition.to_svg())?;
        println!("{name} {:?}: {}", partition.shape, path.display());
        for (label, [x, y]) in &partition.vertices {
            println!("  {label} = ({x}, {y})");
        }
        print!("{}", partition.to_ascii(48, 16));
    }
    Ok(())
}
