//! The 4D light-field container and epipolar-plane slicing.

use crate::image::{Image, ImageError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LfError {
    #[error("light field needs at least one view in each angular direction (got {u}x{v})")]
    EmptyGrid { u: usize, v: usize },
    #[error("view grid has {got} views, expected {expected}")]
    ViewCount { expected: usize, got: usize },
    #[error("missing view (u={u}, v={v})")]
    MissingView { u: usize, v: usize },
    #[error("view (u={u}, v={v}) is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        u: usize,
        v: usize,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },
    #[error("{orientation:?} EPIs have angular extent {extent}; at least 3 is required")]
    DegenerateOrientation {
        orientation: Orientation,
        extent: usize,
    },
    #[error("failed to decode {path}: {message}")]
    DecodeError { path: String, message: String },
    #[error("no files in {dir} match pattern {pattern}")]
    NoMatches { dir: String, pattern: String },
    #[error("invalid layout pattern {0:?}: needs a {{u}} placeholder and literal text otherwise")]
    BadPattern(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// EPI orientation. Horizontal slices fix `(v, t)`; vertical slices fix `(u, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl Orientation {
    /// Feature order: vertical first, then horizontal.
    pub const ALL: [Orientation; 2] = [Orientation::Vertical, Orientation::Horizontal];

    pub fn short_name(self) -> &'static str {
        match self {
            Orientation::Vertical => "ver",
            Orientation::Horizontal => "hor",
        }
    }
}

/// `L(u, v, s, t)`: a `U x V` grid of `S x T` luminance views.
///
/// `u` is the horizontal view index, `v` the vertical one. Views are stored
/// row-major over the view grid (`v * U + u`).
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    u_count: usize,
    v_count: usize,
    views: Vec<Image>,
}

impl LightField {
    /// `views` is indexed `v * u_count + u`.
    pub fn new(u_count: usize, v_count: usize, views: Vec<Image>) -> Result<Self, LfError> {
        if u_count == 0 || v_count == 0 {
            return Err(LfError::EmptyGrid {
                u: u_count,
                v: v_count,
            });
        }
        if views.len() != u_count * v_count {
            return Err(LfError::ViewCount {
                expected: u_count * v_count,
                got: views.len(),
            });
        }
        let (want_w, want_h) = (views[0].width(), views[0].height());
        for (i, view) in views.iter().enumerate() {
            if view.width() != want_w || view.height() != want_h {
                return Err(LfError::DimensionMismatch {
                    u: i % u_count,
                    v: i / u_count,
                    got_w: view.width(),
                    got_h: view.height(),
                    want_w,
                    want_h,
                });
            }
        }
        Ok(LightField {
            u_count,
            v_count,
            views,
        })
    }

    /// Build from a per-view generator, `f(u, v)`.
    pub fn from_fn(
        u_count: usize,
        v_count: usize,
        mut f: impl FnMut(usize, usize) -> Image,
    ) -> Result<Self, LfError> {
        let mut views = Vec::with_capacity(u_count * v_count);
        for v in 0..v_count {
            for u in 0..u_count {
                views.push(f(u, v));
            }
        }
        LightField::new(u_count, v_count, views)
    }

    #[inline]
    pub fn u_count(&self) -> usize {
        self.u_count
    }

    #[inline]
    pub fn v_count(&self) -> usize {
        self.v_count
    }

    /// Spatial width `S`.
    #[inline]
    pub fn width(&self) -> usize {
        self.views[0].width()
    }

    /// Spatial height `T`.
    #[inline]
    pub fn height(&self) -> usize {
        self.views[0].height()
    }

    #[inline]
    pub fn view(&self, u: usize, v: usize) -> &Image {
        &self.views[v * self.u_count + u]
    }

    pub fn views(&self) -> &[Image] {
        &self.views
    }

    #[inline]
    pub fn sample(&self, u: usize, v: usize, s: usize, t: usize) -> f64 {
        self.view(u, v).pixel(s, t)
    }

    /// Angular extent along the axis an EPI of `orientation` spans.
    pub fn angular_extent(&self, orientation: Orientation) -> usize {
        match orientation {
            Orientation::Horizontal => self.u_count,
            Orientation::Vertical => self.v_count,
        }
    }

    /// Number of EPIs of the given orientation.
    pub fn epi_count(&self, orientation: Orientation) -> usize {
        match orientation {
            Orientation::Horizontal => self.v_count * self.height(),
            Orientation::Vertical => self.u_count * self.width(),
        }
    }

    /// The `index`-th EPI in enumeration order: horizontal slices run
    /// `(v*, t*)` with `t*` fastest, vertical slices `(u*, s*)` with `s*` fastest.
    pub fn epi(&self, orientation: Orientation, index: usize) -> EpiSlice {
        match orientation {
            Orientation::Horizontal => {
                let (v, t) = (index / self.height(), index % self.height());
                let (w, h) = (self.width(), self.u_count);
                let mut data = Vec::with_capacity(w * h);
                for u in 0..h {
                    data.extend_from_slice(self.view(u, v).as_plane().row(t));
                }
                EpiSlice {
                    orientation,
                    fixed_angular: v,
                    fixed_spatial: t,
                    pixels: Image::new(w, h, data).expect("slice of valid views"),
                }
            }
            Orientation::Vertical => {
                let (u, s) = (index / self.width(), index % self.width());
                let (w, h) = (self.height(), self.v_count);
                let mut data = Vec::with_capacity(w * h);
                for v in 0..h {
                    let view = self.view(u, v);
                    data.extend((0..w).map(|t| view.pixel(s, t)));
                }
                EpiSlice {
                    orientation,
                    fixed_angular: u,
                    fixed_spatial: s,
                    pixels: Image::new(w, h, data).expect("slice of valid views"),
                }
            }
        }
    }
}

/// A 2D epipolar-plane image.
///
/// Rows are the angular coordinate, columns the spatial one:
/// a horizontal slice for `(v*, t*)` is `S` wide and `U` tall with
/// `pixel(s, u) = L(u, v*, s, t*)`; a vertical slice for `(u*, s*)` is
/// `T` wide and `V` tall with `pixel(t, v) = L(u*, v, s*, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpiSlice {
    pub orientation: Orientation,
    /// `v*` for horizontal slices, `u*` for vertical ones.
    pub fixed_angular: usize,
    /// `t*` for horizontal slices, `s*` for vertical ones.
    pub fixed_spatial: usize,
    pub pixels: Image,
}

/// All EPIs of one orientation, in enumeration order.
pub fn extract_epis(lf: &LightField, orientation: Orientation) -> Result<Vec<EpiSlice>, LfError> {
    let extent = lf.angular_extent(orientation);
    if extent < 3 {
        return Err(LfError::DegenerateOrientation {
            orientation,
            extent,
        });
    }
    Ok((0..lf.epi_count(orientation))
        .map(|i| lf.epi(orientation, i))
        .collect())
}
