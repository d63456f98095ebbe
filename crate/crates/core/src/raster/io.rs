//! 8-bit grayscale image files: covered ink is black (0), empty paper white (255).
//! The container format follows the file extension.

use std::path::Path;

use image::{GrayImage, ImageReader, Luma};

use super::Raster;
use crate::error::{Error, Result};

pub fn write_image(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = raster.dims();
    let img = GrayImage::from_fn(w as u32, h as u32, |x, y| {
        let c = raster.get(x as usize, y as usize);
        Luma([(255.0 * (1.0 - c)).round() as u8])
    });
    img.save(path).map_err(|e| Error::Image { path: path.to_owned(), message: e.to_string() })
}

/// Reads any image the decoder understands; coverage is `1 - luma / 255`.
pub fn read_image(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|e| Error::Io { path: path.to_owned(), source: e })?;
    let img = reader
        .with_guessed_format()
        .map_err(|e| Error::Io { path: path.to_owned(), source: e })?
        .decode()
        .map_err(|e| Error::Image { path: path.to_owned(), message: e.to_string() })?
        .into_luma8();
    let (w, h) = img.dimensions();
    let data = img.pixels().map(|p| 1.0 - p.0[0] as f64 / 255.0).collect();
    Raster::from_vec(w as usize, h as usize, data)
        .map_err(|e| Error::Image { path: path.to_owned(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::raster::Primitive;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.png");
        let mut r = Raster::new(64, 40).unwrap();
        r.draw(&Primitive::disc(Point::new(20.0, 20.0), 8.0));
        r.draw(&Primitive::segment(Point::new(0.0, 30.5), Point::new(50.0, 35.5), 3.0));
        write_image(&r, &path).unwrap();
        assert_eq!(read_image(&path).unwrap(), r);
    }

    #[test]
    fn empty_raster_is_white() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.png");
        write_image(&Raster::new(9, 5).unwrap(), &path).unwrap();
        let img = image::open(&path).unwrap().into_luma8();
        assert!(img.pixels().all(|p| p.0[0] == 255));
    }

    #[test]
    fn gray_density_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.png");
        let r = Raster::from_fn(50, 50, |x, y| ((x * 13 + y * 7) % 101) as f64 / 100.0).unwrap();
        write_image(&r, &path).unwrap();
        let back = read_image(&path).unwrap();
        assert!((back.density() - r.density()).abs() <= 1.0 / 510.0);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = read_image("/definitely/not/here.png").unwrap_err();
        assert!(err.to_string().contains("/definitely/not/here.png"));
    }

    #[test]
    fn corrupt_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        std::fs::write(&path, b"not an image").unwrap();
        assert!(read_image(&path).is_err());
    }
}
