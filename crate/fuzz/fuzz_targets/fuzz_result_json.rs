#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = dbfsim::load_results_json(text) {
        let _ = grid.shape();
        let _ = dbfsim::sweep::sir_min_entries(&grid);
        let mut buf = Vec::new();
        let _ = dbfsim::output::write_csv(&grid, &mut buf);
        let _ = dbfsim::plot::render_svg(&grid);
    }
});
