//! Write the six named scenarios as editable config files. With no
//! argument they go to `configs/`; pass a directory to put them
//! elsewhere.

use taxisim::catalog;

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "configs".to_string());
    std::fs::create_dir_all(&dir).expect("create output directory");
    for name in catalog::SCENARIOS {
        let cfg = catalog::by_name(name).expect("catalog name");
        let path = format!("{dir}/{name}.ini");
        std::fs::write(&path, cfg.to_ini_string()).expect("write config");
        println!("wrote {path}");
    }
}
