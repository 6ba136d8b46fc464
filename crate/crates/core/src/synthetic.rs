//! Deterministic test scenes.

use crate::image::Image;

/// Piecewise-constant scene: background, two rectangles, a disc and a diagonal band.
///
/// Intensities stay inside `[0.1, 0.9]` so salt-and-pepper impulses are always distinguishable.
pub fn piecewise_constant(rows: usize, cols: usize) -> Image {
    let (h, w) = (rows as f64, cols as f64);
    Image::from_fn(rows, cols, |r, c| {
        let (y, x) = (r as f64 / h, c as f64 / w);
        let dy = y - 0.65;
        let dx = x - 0.3;
        if dy * dy + dx * dx < 0.04 {
            0.85
        } else if (0.1..0.45).contains(&y) && (0.15..0.5).contains(&x) {
            0.7
        } else if (0.2..0.8).contains(&y) && (0.6..0.85).contains(&x) {
            0.3
        } else if (x - y).abs() < 0.05 {
            0.55
        } else {
            0.15
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_has_several_levels() {
        let img = piecewise_constant(64, 64);
        let mut levels: Vec<u64> = img.pixels().map(f64::to_bits).collect();
        levels.sort_unstable();
        levels.dedup();
        assert_eq!(levels.len(), 5);
        assert!(img.pixels().all(|v| (0.1..=0.9).contains(&v)));
    }
}
