//! Mesh export of a family: one CSV row per `(τ_k, node)`.
//!
//! Rows are `τ`-major, then ring (boundary ring last), then angle. `w` is
//! reported in the original fiber coordinate, `u` in the normalized one.

use std::fmt::Write;

use leviflat::{Family, FiberChange};

pub const HEADER: &str = "tau_index,tau,z_re,z_im,w_re,w_im,u_re,u_im";

pub fn render(family: &Family, change: &FiberChange) -> String {
    let grid = family.discs[0].w.grid();
    let rows = family.discs.len() * grid.len();
    let mut out = String::with_capacity(64 * (rows + 1));
    out.push_str(HEADER);
    out.push('\n');
    for (k, disc) in family.discs.iter().enumerate() {
        for ((&z, &wp), &u) in grid.points().iter().zip(disc.w.values()).zip(disc.u.values()) {
            let w = change.inverse(z, wp);
            let _ = writeln!(out, "{k},{},{},{},{},{},{},{}", disc.tau, z.re, z.im, w.re, w.im, u.re, u.im);
        }
    }
    out
}
