//! Dense single-channel grids.
//!
//! [`Plane`] is an unconstrained real-valued grid used for intermediate maps
//! (MSCN coefficients, activity, cyclopean images). [`Image`] wraps a plane
//! whose samples are luminance values in `[0, 255]`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("buffer of length {len} does not match {width}x{height}")]
    BadLength {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("sample {value} at index {index} is outside [0, 255] or not finite")]
    OutOfRange { index: usize, value: f64 },
    #[error("image {width}x{height} is too small (need at least {min_width}x{min_height})")]
    TooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },
}

/// Row-major grid of `f64` samples. `x` indexes columns, `y` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        if data.len() != width * height {
            return Err(ImageError::BadLength {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    /// Sample with replicate (edge-clamp) border handling.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// 2x2 box-filter decimation. Odd trailing rows/columns are dropped.
    pub fn downsample2(&self) -> Result<Plane, ImageError> {
        if self.width < 2 || self.height < 2 {
            return Err(ImageError::TooSmall {
                width: self.width,
                height: self.height,
                min_width: 2,
                min_height: 2,
            });
        }
        let (w, h) = (self.width / 2, self.height / 2);
        Ok(Plane::from_fn(w, h, |x, y| {
            let (sx, sy) = (2 * x, 2 * y);
            (self.get(sx, sy) + self.get(sx + 1, sy) + self.get(sx, sy + 1) + self.get(sx + 1, sy + 1))
                * 0.25
        }))
    }
}

/// Luminance image with every sample finite and in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image(Plane);

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        Image::try_from(Plane::new(width, height, data)?)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, ImageError> {
        Image::try_from(Plane::filled(width, height, value))
    }

    /// Build from a closure, clamping the result into `[0, 255]`.
    pub fn from_fn_clamped(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        Image(Plane::from_fn(width, height, |x, y| f(x, y).clamp(0.0, 255.0)))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.0.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.0.height
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> f64 {
        self.0.get(x, y)
    }

    pub fn data(&self) -> &[f64] {
        &self.0.data
    }

    pub fn as_plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }

    pub fn downsample2(&self) -> Result<Image, ImageError> {
        // Means of in-range values stay in range.
        self.0.downsample2().map(Image)
    }
}

impl TryFrom<Plane> for Image {
    type Error = ImageError;

    fn try_from(plane: Plane) -> Result<Self, Self::Error> {
        if let Some((index, &value)) = plane
            .data
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=255.0).contains(*v)))
        {
            return Err(ImageError::OutOfRange { index, value });
        }
        Ok(Image(plane))
    }
}

impl AsRef<Plane> for Image {
    fn as_ref(&self) -> &Plane {
        &self.0
    }
}

/// Free-function form of [`Image::downsample2`].
pub fn downsample2(img: &Image) -> Result<Image, ImageError> {
    img.downsample2()
}
