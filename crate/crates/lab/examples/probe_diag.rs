fn main() {
    use perpetuity_lab::diagnostics::recurrence_diagnostic;
    use perpetuity_lab::model::presets;
    for level in [2.0, 2.2, 2.5] {
        for s in [0.25, 0.5, 1.5, 2.0] {
            let spec = presets::constant_m_log_tail(s);
            let mut min_ret = f64::INFINITY;
            let mut max_ret: f64 = 0.0;
            let mut worst_slope_t: f64 = 0.0;
            let mut worst_slope_r = f64::INFINITY;
            for seed in 1u64..=10 {
                let d = recurrence_diagnostic(&spec, 0.0, level, 100_000, 200, seed);
                min_ret = min_ret.min(d.return_fraction);
                max_ret = max_ret.max(d.return_fraction);
                if s > 1.0 { worst_slope_t = worst_slope_t.max(d.log_slope); }
                else { worst_slope_r = worst_slope_r.min(d.log_slope); }
            }
            if s > 1.0 {
                println!("level={level:.1} s={s}: worst slope={worst_slope_t:.4} max_ret={max_ret:.3}");
            } else {
                println!("level={level:.1} s={s}: min_ret={min_ret:.3} min slope={worst_slope_r:.3}");
            }
        }
    }
}
