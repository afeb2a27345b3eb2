//! Linear RGB to opponent-colour transform: white-black (O1), red-green
//! (O2), yellow-blue (O3).

use crate::raster::{RasterPlane, RgbImage};

/// Rows produce O1, O2, O3 from `[R, G, B]`. Four-decimal coefficients,
/// rows are not renormalized.
pub const OPPONENT_MATRIX: [[f64; 3]; 3] = [
    [0.2814, 0.6938, 0.0638],
    [-0.0971, 0.1458, -0.0250],
    [-0.0930, -0.2529, 0.4665],
];

#[derive(Debug, Clone, PartialEq)]
pub struct OpponentImage {
    pub wb: RasterPlane,
    pub rg: RasterPlane,
    pub yb: RasterPlane,
}

impl OpponentImage {
    pub fn channels(&self) -> [&RasterPlane; 3] {
        [&self.wb, &self.rg, &self.yb]
    }
}

#[inline]
pub fn opponent_pixel(rgb: [f64; 3]) -> [f64; 3] {
    OPPONENT_MATRIX.map(|row| row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2])
}

pub fn rgb_to_opponent(image: &RgbImage) -> OpponentImage {
    let (w, h) = image.dims();
    let n = w * h;
    let (mut wb, mut rg, mut yb) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let (r, g, b) = (image.r.data(), image.g.data(), image.b.data());
    for i in 0..n {
        let [o1, o2, o3] = opponent_pixel([r[i], g[i], b[i]]);
        wb.push(o1);
        rg.push(o2);
        yb.push(o3);
    }
    OpponentImage {
        wb: RasterPlane::from_parts(w, h, wb),
        rg: RasterPlane::from_parts(w, h, rg),
        yb: RasterPlane::from_parts(w, h, yb),
    }
}
