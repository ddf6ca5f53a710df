use super::function::{merge_grids, QuantileFunction};
use super::measure::Density;
use crate::{Error, Result};

/// Density of `f_*(ρ·Leb)` for a nondecreasing piecewise-linear `f`.
///
/// On each cell of the common refinement of `f`'s breakpoints and `ρ`'s grid
/// the image density is `ρ / f′` transported to `f(cell)`. A flat piece of `f`
/// meeting positive density collapses mass onto a point, so the pushforward
/// has no density there and [`Error::SingularPushforward`] is returned.
pub fn pushforward_density(f: &QuantileFunction, rho: &Density) -> Result<Density> {
    let mut grid = vec![0.0];
    let mut heights = Vec::new();
    // Mass of cells whose image rounds to a single point; it is handed to
    // the next image cell.
    let mut carry = 0.0;
    for cell in merge_grids(f.breakpoints(), rho.grid()) {
        let h = rho.heights()[cell.right];
        if h == 0.0 {
            continue;
        }
        let seg = f.segment(cell.left);
        if seg.is_flat() {
            return Err(Error::SingularPushforward {
                lo: cell.t0,
                hi: cell.t1,
                density: h,
            });
        }
        let (y0, y1) = (seg.at(cell.t0), seg.at(cell.t1));
        let mass = h * (cell.t1 - cell.t0) + carry;
        if y1 <= y0 {
            carry = mass;
            continue;
        }
        carry = 0.0;
        let cursor = *grid.last().unwrap();
        if y0 > cursor {
            grid.push(y0);
            heights.push(0.0);
        }
        grid.push(y1);
        heights.push(mass / (y1 - y0));
    }
    if carry > 0.0 {
        match heights.last_mut() {
            Some(last) => {
                let n = grid.len();
                *last += carry / (grid[n - 1] - grid[n - 2]);
            }
            // Everything landed on one point.
            None => {
                return Err(Error::SingularPushforward {
                    lo: 0.0,
                    hi: 1.0,
                    density: carry,
                });
            }
        }
    }
    if *grid.last().unwrap() < 1.0 {
        grid.push(1.0);
        heights.push(0.0);
    }
    Ok(Density::from_parts(grid, heights))
}
