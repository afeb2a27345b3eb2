//! Image decode/encode and the `WECSF1` float plane dump.
//!
//! `WECSF1` layout, all little-endian:
//!
//! | offset | size  | content                         |
//! |--------|-------|---------------------------------|
//! | 0      | 6     | ASCII `WECSF1`                  |
//! | 6      | 4     | `u32` width                     |
//! | 10     | 4     | `u32` height                    |
//! | 14     | 8·w·h | `f64` samples, row-major        |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::raster::{quantize_u8, RasterPlane, RgbImage, SaliencyMap};

pub const PLANE_MAGIC: &[u8; 6] = b"WECSF1";

fn open_decoder(path: &Path) -> Result<ImageReader<BufReader<File>>> {
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Jpeg) => Ok(reader),
        _ => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
        }),
    }
}

fn decode_error(path: &Path, e: image::ImageError) -> Error {
    Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Decodes a PNG or JPEG file into `[0, 1]` RGB planes.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let img = open_decoder(path)?
        .decode()
        .map_err(|e| decode_error(path, e))?
        .to_rgb8();
    RgbImage::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())
}

/// Decodes a PNG or JPEG file as one luma plane scaled to `[0, 1]`.
pub fn load_gray(path: impl AsRef<Path>) -> Result<RasterPlane> {
    let path = path.as_ref();
    let img = open_decoder(path)?
        .decode()
        .map_err(|e| decode_error(path, e))?
        .to_luma8();
    RasterPlane::new(
        img.width() as usize,
        img.height() as usize,
        img.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect(),
    )
}

/// Reads only the header of an image to get `(width, height)`.
pub fn image_dimensions(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let (w, h) = open_decoder(path)?
        .into_dimensions()
        .map_err(|e| decode_error(path, e))?;
    Ok((w as usize, h as usize))
}

fn save_buffer(path: &Path, bytes: &[u8], width: usize, height: usize, color: image::ExtendedColorType) -> Result<()> {
    image::save_buffer_with_format(path, bytes, width as u32, height as u32, color, ImageFormat::Png).map_err(|e| {
        match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Decode {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        }
    })
}

/// Writes a plane as 8-bit grayscale PNG, `round(255 * clamp(v))`.
pub fn save_gray_png(plane: &RasterPlane, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = plane.data().iter().map(|&v| quantize_u8(v)).collect();
    save_buffer(
        path.as_ref(),
        &bytes,
        plane.width(),
        plane.height(),
        image::ExtendedColorType::L8,
    )
}

pub fn save_saliency_png(map: &SaliencyMap, path: impl AsRef<Path>) -> Result<()> {
    save_gray_png(&map.plane, path)
}

pub fn save_rgb_png(image: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    save_buffer(
        path.as_ref(),
        &image.to_rgb8(),
        image.width(),
        image.height(),
        image::ExtendedColorType::Rgb8,
    )
}

const HEAT_STOPS: [[f64; 3]; 5] = [
    [0.0, 0.0, 0.3],
    [0.3, 0.0, 0.6],
    [0.85, 0.2, 0.3],
    [1.0, 0.65, 0.0],
    [1.0, 1.0, 0.85],
];

/// Colour for `t` in `[0, 1]` on a dark-to-bright heat ramp.
pub fn heat_color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (HEAT_STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(HEAT_STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (HEAT_STOPS[i], HEAT_STOPS[i + 1]);
    [0, 1, 2].map(|c| quantize_u8(a[c] + f * (b[c] - a[c])))
}

/// Writes a min-max scaled heat map of an arbitrary plane.
pub fn save_heatmap_png(plane: &RasterPlane, path: impl AsRef<Path>) -> Result<()> {
    let norm = crate::raster::normalize_minmax(plane);
    let bytes: Vec<u8> = norm.data().iter().flat_map(|&v| heat_color(v)).collect();
    save_buffer(
        path.as_ref(),
        &bytes,
        plane.width(),
        plane.height(),
        image::ExtendedColorType::Rgb8,
    )
}

pub fn write_plane<W: Write>(plane: &RasterPlane, mut out: W) -> std::io::Result<()> {
    out.write_all(PLANE_MAGIC)?;
    out.write_all(&(plane.width() as u32).to_le_bytes())?;
    out.write_all(&(plane.height() as u32).to_le_bytes())?;
    for v in plane.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_plane<R: Read>(mut input: R) -> Result<RasterPlane> {
    let bad = |m: &str| Error::Decode {
        path: "<WECSF1 stream>".into(),
        message: m.to_string(),
    };
    let mut header = [0u8; 14];
    input.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
    if &header[..6] != PLANE_MAGIC {
        return Err(bad("bad magic"));
    }
    let width = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|_| bad("read failure"))?;
    if bytes.len() != width * height * 8 {
        return Err(bad("payload length does not match header"));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    RasterPlane::new(width, height, data)
}

pub fn save_plane(plane: &RasterPlane, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_plane(plane, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_plane(path: impl AsRef<Path>) -> Result<RasterPlane> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_plane(BufReader::new(file)).map_err(|e| match e {
        Error::Decode { message, .. } => Error::Decode {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dump_header_layout() {
        let p = RasterPlane::new(2, 1, vec![1.0, -0.5]).unwrap();
        let mut buf = Vec::new();
        write_plane(&p, &mut buf).unwrap();
        assert_eq!(&buf[..6], b"WECSF1");
        assert_eq!(&buf[6..10], &[2, 0, 0, 0]);
        assert_eq!(&buf[10..14], &[1, 0, 0, 0]);
        assert_eq!(&buf[14..22], &1.0f64.to_le_bytes());
        assert_eq!(buf.len(), 14 + 16);
    }

    #[test]
    fn dump_rejects_garbage() {
        assert!(read_plane(&b"WECSF2\0\0\0\0\0\0\0\0"[..]).is_err());
        let mut buf = Vec::new();
        write_plane(&RasterPlane::zeros(3, 3).unwrap(), &mut buf).unwrap();
        buf.pop();
        assert!(read_plane(&buf[..]).is_err());
    }

    #[test]
    fn png_round_trip_quantizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let p = RasterPlane::new(3, 1, vec![0.0, 0.5, 1.0]).unwrap();
        save_gray_png(&p, &path).unwrap();
        let back = load_gray(&path).unwrap();
        assert_eq!(back.data(), &[0.0, 128.0 / 255.0, 1.0]);
        assert_eq!(image_dimensions(&path).unwrap(), (3, 1));
    }

    #[test]
    fn rejects_non_png_jpeg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        std::fs::write(&path, b"GIF89a\x01\x00\x01\x00").unwrap();
        assert!(matches!(load_rgb(&path), Err(Error::UnsupportedFormat { .. })));
    }

    proptest! {
        #[test]
        fn dump_round_trip(w in 1usize..6, h in 1usize..6, seed in any::<u64>()) {
            let p = RasterPlane::from_fn(w, h, |x, y| ((x * 7919 + y * 104729) as u64 ^ seed) as f64 * 1e-3).unwrap();
            let mut buf = Vec::new();
            write_plane(&p, &mut buf).unwrap();
            prop_assert_eq!(read_plane(&buf[..]).unwrap(), p);
        }
    }
}
