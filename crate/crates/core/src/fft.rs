//! 2-D discrete Fourier transforms on row-major grids, and the quadrant
//! shifts that move the zero frequency to and from the grid centre.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::raster::RasterPlane;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Row-major grid of complex samples, typically a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn from_real(plane: &RasterPlane) -> Self {
        Self {
            width: plane.width(),
            height: plane.height(),
            data: plane.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn real(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.re).collect()
    }

    pub fn imag(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.im).collect()
    }
}

fn transform(grid: &mut ComplexGrid, direction: FftDirection) {
    let (w, h) = (grid.width, grid.height);
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let row_fft = planner.plan_fft(w, direction);
        let col_fft = planner.plan_fft(h, direction);

        let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
        for row in grid.data.chunks_exact_mut(w) {
            row_fft.process_with_scratch(row, &mut scratch);
        }

        let mut column = vec![Complex64::default(); h];
        scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
        for x in 0..w {
            for (y, c) in column.iter_mut().enumerate() {
                *c = grid.data[y * w + x];
            }
            col_fft.process_with_scratch(&mut column, &mut scratch);
            for (y, c) in column.iter().enumerate() {
                grid.data[y * w + x] = *c;
            }
        }
    });
}

/// Unnormalized forward transform of a real plane.
pub fn fft2(plane: &RasterPlane) -> ComplexGrid {
    let mut grid = ComplexGrid::from_real(plane);
    transform(&mut grid, FftDirection::Forward);
    grid
}

/// Forward transform of a complex grid.
pub fn fft2_complex(grid: &ComplexGrid) -> ComplexGrid {
    let mut out = grid.clone();
    transform(&mut out, FftDirection::Forward);
    out
}

/// Inverse transform, scaled by `1 / (width * height)`.
pub fn ifft2(grid: &ComplexGrid) -> ComplexGrid {
    let mut out = grid.clone();
    transform(&mut out, FftDirection::Inverse);
    let scale = 1.0 / (out.width * out.height) as f64;
    out.data.iter_mut().for_each(|c| *c *= scale);
    out
}

/// Real part of [`ifft2`] as a plane.
pub fn ifft2_real(grid: &ComplexGrid) -> RasterPlane {
    let re = ifft2(grid).real();
    RasterPlane::from_parts(grid.width, grid.height, re)
}

fn roll<T: Copy>(width: usize, height: usize, data: &[T], sx: usize, sy: usize) -> Vec<T> {
    assert_eq!(data.len(), width * height);
    let mut out = data.to_vec();
    for y in 0..height {
        let ty = (y + sy) % height;
        for x in 0..width {
            out[ty * width + (x + sx) % width] = data[y * width + x];
        }
    }
    out
}

/// Moves index 0 of each axis to `floor(n / 2)`.
pub fn fftshift<T: Copy>(width: usize, height: usize, data: &[T]) -> Vec<T> {
    roll(width, height, data, width / 2, height / 2)
}

/// Inverse of [`fftshift`] for both even and odd sizes.
pub fn ifftshift<T: Copy>(width: usize, height: usize, data: &[T]) -> Vec<T> {
    roll(width, height, data, width - width / 2, height - height / 2)
}
